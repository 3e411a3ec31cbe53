//! Exact-arithmetic least squares through the normal equations.

use num_bigint::BigInt;
use num_rational::BigRational;
use alphaforge_core::analytics::ols_fit;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub struct ExactFit {
    pub beta: Vec<f64>,
    pub std_error: Vec<f64>,
    pub r_squared: f64,
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite input")
}

fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().expect("representable")
}

/// Gauss-Jordan inverse of a square rational matrix.
fn invert(mut a: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let k = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..k)
        .map(|r| {
            (0..k)
                .map(|c| BigRational::from_integer(BigInt::from((r == c) as i32)))
                .collect()
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !a[r][col].is_zero())
            .expect("singular normal matrix");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for c in 0..k {
            a[col][c] = &a[col][c] / &p;
            inv[col][c] = &inv[col][c] / &p;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..k {
                    let da = &f * &a[col][c];
                    let di = &f * &inv[col][c];
                    a[r][c] = &a[r][c] - da;
                    inv[r][c] = &inv[r][c] - di;
                }
            }
        }
    }
    inv
}

/// Fit `y` on the given columns (an intercept column is prepended when
/// requested) by solving `(XᵀX) β = Xᵀy` in exact rationals.
pub fn normal_equations(y: &[f64], columns: &[Vec<f64>], intercept: bool) -> ExactFit {
    let n = y.len();
    let mut design: Vec<Vec<BigRational>> = Vec::new();
    if intercept {
        design.push(vec![BigRational::from_integer(BigInt::from(1)); n]);
    }
    for c in columns {
        design.push(c.iter().map(|&v| exact(v)).collect());
    }
    let yq: Vec<BigRational> = y.iter().map(|&v| exact(v)).collect();
    let k = design.len();
    let dot = |a: &[BigRational], b: &[BigRational]| -> BigRational {
        a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
    };
    let xtx: Vec<Vec<BigRational>> = (0..k)
        .map(|r| (0..k).map(|c| dot(&design[r], &design[c])).collect())
        .collect();
    let xty: Vec<BigRational> = (0..k).map(|r| dot(&design[r], &yq)).collect();
    let inv = invert(xtx);
    let beta: Vec<BigRational> = (0..k).map(|r| dot(&inv[r], &xty)).collect();

    let mut rss = BigRational::zero();
    for row in 0..n {
        let fitted = (0..k).fold(BigRational::zero(), |acc, c| acc + &beta[c] * &design[c][row]);
        let e = &yq[row] - fitted;
        rss += &e * &e;
    }
    let tss = if intercept {
        let mean = yq.iter().fold(BigRational::zero(), |a, v| a + v)
            / BigRational::from_integer(BigInt::from(n as i64));
        yq.iter().fold(BigRational::zero(), |a, v| {
            let d = v - &mean;
            a + &d * &d
        })
    } else {
        yq.iter().fold(BigRational::zero(), |a, v| a + v * v)
    };
    let s2 = to_f64(&rss) / (n - k) as f64;
    ExactFit {
        beta: beta.iter().map(to_f64).collect(),
        std_error: (0..k).map(|j| (s2 * to_f64(&inv[j][j])).sqrt()).collect(),
        r_squared: 1.0 - to_f64(&(rss / tss)),
    }
}

/// Worst coefficient and standard error gap against the exact oracle over
/// `count` random well-conditioned problems.
pub fn ols_oracle_gap(seed: u64, count: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for p in 0..count {
        let mut r = super::rng(seed + p as u64);
        let n = r.gen_range(20..120);
        let k = r.gen_range(1..4);
        let intercept = p % 5 != 0;
        let columns: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| StandardNormal.sample(&mut r)).collect())
            .collect();
        let beta: Vec<f64> = (0..k).map(|_| r.gen_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let signal: f64 = (0..k).map(|j| beta[j] * columns[j][i]).sum();
                let noise: f64 = StandardNormal.sample(&mut r);
                1.5 * intercept as u8 as f64 + signal + 0.5 * noise
            })
            .collect();
        let names = ["a", "b", "c"];
        let regressors: Vec<(&str, &[f64])> = (0..k).map(|j| (names[j], columns[j].as_slice())).collect();
        let fit = ols_fit(&y, &regressors, intercept).unwrap();
        let exact = normal_equations(&y, &columns, intercept);
        for (c, (b, se)) in fit.coefficients.iter().zip(exact.beta.iter().zip(&exact.std_error)) {
            worst = worst.max((c.estimate - b).abs()).max((c.std_error - se).abs());
        }
        worst = worst.max((fit.r_squared - exact.r_squared).abs());
    }
    worst
}
