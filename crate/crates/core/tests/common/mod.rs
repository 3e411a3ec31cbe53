#![allow(dead_code)]

pub mod naive;
pub mod oracle;
pub mod scenarios;
pub mod suite;

use alphaforge_core::data::{
    IndustryMap, MarketPanels, TradingCalendar, Universe,
};
use alphaforge_core::{MarketData, Panel};
use chrono::NaiveDate;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::BTreeMap;
use std::sync::Arc;

use alphaforge_core::backtest::AlphaCorrMatrix;
use nalgebra::DMatrix;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal cells with the given share of NaN. When `coarse` is set the
/// values are rounded to one decimal so ties show up in ranks and extrema.
pub fn random_panel(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    nan_share: f64,
    coarse: bool,
) -> Panel {
    let values = (0..rows * cols)
        .map(|_| {
            if rng.gen_bool(nan_share) {
                f64::NAN
            } else {
                let v: f64 = StandardNormal.sample(rng);
                if coarse {
                    (v * 10.0).round() / 10.0
                } else {
                    v
                }
            }
        })
        .collect();
    Panel::from_values(rows, cols, values).unwrap()
}

/// Largest absolute difference between two equally shaped value slices.
/// A NaN in one slice but not the other counts as an infinite difference.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).fold(0.0, |worst: f64, (x, y)| {
        let d = match (x.is_nan(), y.is_nan()) {
            (true, true) => 0.0,
            (false, false) => (x - y).abs(),
            _ => f64::INFINITY,
        };
        worst.max(d)
    })
}

pub fn dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    (0..n)
        .map(|d| start + chrono::Duration::days(d as i64))
        .collect()
}

/// Market whose bars are all pinned to `close` (open = high = low = vwap),
/// with unit volume and no cap. Returns are derived from close.
pub fn market_from_close(rows: usize, cols: usize, close: Vec<f64>) -> MarketData {
    let calendar = Arc::new(TradingCalendar::new(dates(rows)).unwrap());
    let universe = Arc::new(
        Universe::new((0..cols).map(|i| format!("X{i}")).collect()).unwrap(),
    );
    let close = Panel::new(calendar, universe, close).unwrap();
    MarketData::new(
        MarketPanels {
            open: close.clone(),
            high: close.clone(),
            low: close.clone(),
            vwap: close.clone(),
            volume: close.with_values(vec![1.0; rows * cols]),
            close,
            cap: None,
            returns: None,
        },
        IndustryMap::new(),
    )
    .unwrap()
}

/// Daily return series driven by three shared factors plus own noise.
pub fn factor_returns(seed: u64, series: usize, days: usize) -> BTreeMap<u32, Vec<f64>> {
    let mut r = rng(seed);
    let factors: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..days).map(|_| StandardNormal.sample(&mut r)).collect())
        .collect();
    (0..series as u32)
        .map(|k| {
            let load: Vec<f64> = (0..3).map(|_| StandardNormal.sample(&mut r)).collect();
            let s = (0..days)
                .map(|t| {
                    let common: f64 = (0..3).map(|f| load[f] * factors[f][t]).sum();
                    let own: f64 = StandardNormal.sample(&mut r);
                    1e-3 * (common + own)
                })
                .collect();
            (k + 1, s)
        })
        .collect()
}

pub fn check_psi(psi: &AlphaCorrMatrix) -> Result<f64, String> {
    let n = psi.len();
    for i in 0..n {
        if psi.get(i, i) != 1.0 {
            return Err(format!("diagonal {i} is {}", psi.get(i, i)));
        }
        for j in 0..n {
            let (a, b) = (psi.get(i, j), psi.get(j, i));
            if (a - b).abs() > 1e-14 {
                return Err(format!("asymmetric at ({i}, {j})"));
            }
            if !(-1.0..=1.0).contains(&a) {
                return Err(format!("entry ({i}, {j}) = {a}"));
            }
        }
    }
    let m = DMatrix::from_row_slice(n, n, &psi.psi);
    let min = m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-8 {
        return Err(format!("eigenvalue {min}"));
    }
    Ok(min)
}
