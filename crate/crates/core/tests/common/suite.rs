//! Runs every kernel against its naive reference on randomized panels.

use std::collections::BTreeMap;

use alphaforge_core::ops::{self, BinaryKind, GroupVector, Operand, UnaryKind, VARIANCE_EPSILON};
use rand::Rng;

use super::{max_abs_diff, naive, random_panel, rng};

pub const WINDOWS: [usize; 8] = [1, 2, 3, 5, 7, 10, 15, 20];

/// Worst absolute difference per kernel over `count` panels of
/// `rows x cols` with `nan_share` missing cells.
pub fn kernel_oracle_report(
    seed: u64,
    count: usize,
    rows: usize,
    cols: usize,
    nan_share: f64,
) -> BTreeMap<&'static str, f64> {
    let mut worst: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut record = |name: &'static str, got: &[f64], want: &[f64]| {
        let d = max_abs_diff(got, want);
        let e = worst.entry(name).or_insert(0.0);
        *e = e.max(d);
    };
    for p in 0..count {
        let mut r = rng(seed.wrapping_add(p as u64));
        let coarse = p % 2 == 1;
        let x = random_panel(&mut r, rows, cols, nan_share, coarse);
        let y = random_panel(&mut r, rows, cols, nan_share, coarse);
        let d = WINDOWS[p % WINDOWS.len()];
        let d2 = WINDOWS[(p + 3) % WINDOWS.len()];

        record("delay", ops::ts_delay(&x, d).values(), &naive::delay(&x, d));
        record("delta", ops::ts_delta(&x, d).values(), &naive::delta(&x, d));
        record("sum", ops::ts_sum(&x, d).values(), &naive::sum(&x, d));
        record("product", ops::ts_product(&x, d2).values(), &naive::product(&x, d2));
        record("stddev", ops::ts_stddev(&x, d).values(), &naive::stddev(&x, d));
        record("ts_min", ops::ts_min(&x, d).values(), &naive::ts_min(&x, d));
        record("ts_max", ops::ts_max(&x, d2).values(), &naive::ts_max(&x, d2));
        record("ts_argmax", ops::ts_argmax(&x, d).values(), &naive::argmax(&x, d));
        record("ts_argmin", ops::ts_argmin(&x, d2).values(), &naive::argmin(&x, d2));
        record("ts_rank", ops::ts_rank(&x, d).values(), &naive::ts_rank(&x, d));
        record(
            "decay_linear",
            ops::decay_linear(&x, d2).values(),
            &naive::decay_linear(&x, d2),
        );
        record(
            "correlation",
            ops::ts_correlation(&x, &y, d, VARIANCE_EPSILON).unwrap().values(),
            &naive::correlation(&x, &y, d, VARIANCE_EPSILON),
        );
        record(
            "covariance",
            ops::ts_covariance(&x, &y, d2).unwrap().values(),
            &naive::covariance(&x, &y, d2),
        );
        record("rank", ops::cs_rank(&x).values(), &naive::rank(&x));
        let a = [1.0, 2.5, 0.3][p % 3];
        record("scale", ops::cs_scale(&x, a).values(), &naive::scale(&x, a));
        let groups: Vec<usize> = (0..cols).map(|_| r.gen_range(0..6)).collect();
        record(
            "indneutralize",
            ops::cs_indneutralize(&x, &GroupVector::new(groups.clone()))
                .unwrap()
                .values(),
            &naive::indneutralize(&x, &groups),
        );
        record(
            "abs",
            ops::elementwise_unary(UnaryKind::Abs, &x).values(),
            &naive::map(&x, f64::abs),
        );
        record(
            "log",
            ops::elementwise_unary(UnaryKind::Log, &x).values(),
            &naive::map(&x, |v| if v > 0.0 { v.ln() } else { f64::NAN }),
        );
        record(
            "sign",
            ops::elementwise_unary(UnaryKind::Sign, &x).values(),
            &naive::map(&x, |v| {
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    v
                }
            }),
        );
        let exponent = [2.0, 0.5, 3.0][p % 3];
        record(
            "signedpower",
            ops::signedpower(Operand::Panel(&x), Operand::Scalar(exponent))
                .unwrap()
                .values(),
            &naive::map(&x, |v| naive::signedpower(v, exponent)),
        );
        let want_div: Vec<f64> = x
            .values()
            .iter()
            .zip(y.values())
            .map(|(a, b)| {
                let q = a / b;
                if q.is_finite() {
                    q
                } else {
                    f64::NAN
                }
            })
            .collect();
        record(
            "divide",
            ops::elementwise_binary(BinaryKind::Div, Operand::Panel(&x), Operand::Panel(&y))
                .unwrap()
                .values(),
            &want_div,
        );
    }
    worst
}
