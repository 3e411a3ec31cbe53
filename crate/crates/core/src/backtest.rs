//! Dollar-neutral position construction, daily P&L simulation, per-alpha
//! performance statistics and the alpha return correlation matrix.
//!
//! Weights formed from day `t` data are held from the close of `t` to the
//! close of `t + 1`. Turnover is measured on target weights; price drift of
//! held positions between rebalances is ignored.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::corpus::DelayClass;
use crate::data::{MarketData, Panel};

/// Trading days per year used for annualization.
pub const TRADING_DAYS: f64 = 252.0;

/// Tolerance for the neutrality and unit-gross checks on weights.
pub const WEIGHT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BacktestError {
    #[error("weights violate neutrality invariant on day {day}: sum {sum:e}")]
    NotNeutral { day: usize, sum: f64 },
    #[error("weights violate unit gross invariant on day {day}: gross {gross}")]
    NotUnitGross { day: usize, gross: f64 },
    #[error("weight on day {day}, asset {asset} is not finite")]
    NonFiniteWeight { day: usize, asset: usize },
    #[error("book size must be positive and finite, got {0}")]
    BookSize(f64),
    #[error("weights and market data are not on the same calendar and universe")]
    Misaligned,
    #[error("need at least {required} valid days, have {available}")]
    InsufficientData { required: usize, available: usize },
    #[error("return series {id} has length {len}, expected {expected}")]
    SeriesLength { id: u32, len: usize, expected: usize },
}

/// Daily portfolio weights as fractions of book.
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    weights: Panel,
}

impl WeightMatrix {
    /// Wrap a weight panel after checking that every day is either flat or
    /// dollar-neutral with unit gross exposure.
    pub fn new(weights: Panel) -> Result<Self, BacktestError> {
        for t in 0..weights.rows() {
            let row = weights.row(t);
            if let Some(asset) = row.iter().position(|w| !w.is_finite()) {
                return Err(BacktestError::NonFiniteWeight { day: t, asset });
            }
            if row.iter().all(|&w| w == 0.0) {
                continue;
            }
            let sum: f64 = row.iter().sum();
            if sum.abs() > WEIGHT_TOLERANCE {
                return Err(BacktestError::NotNeutral { day: t, sum });
            }
            let gross: f64 = row.iter().map(|w| w.abs()).sum();
            if (gross - 1.0).abs() > WEIGHT_TOLERANCE {
                return Err(BacktestError::NotUnitGross { day: t, gross });
            }
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &Panel {
        &self.weights
    }

    pub fn into_panel(self) -> Panel {
        self.weights
    }

    /// The opposite portfolio on every day.
    pub fn negated(&self) -> Self {
        Self {
            weights: self.weights.map_indexed(|t, i| -self.weights.get(t, i)),
        }
    }

    /// First day holding a nonzero position.
    pub fn first_active_day(&self) -> Option<usize> {
        (0..self.weights.rows()).find(|&t| self.weights.row(t).iter().any(|&w| w != 0.0))
    }
}

/// Demean each day's alpha values over the assets that have one, then scale
/// to unit gross exposure. Days with no spread are flat; missing values get
/// zero weight.
pub fn alpha_to_weights(alpha: &Panel) -> WeightMatrix {
    let cols = alpha.cols();
    let mut out = vec![0.0; alpha.values().len()];
    for t in 0..alpha.rows() {
        let row = alpha.row(t);
        let present: Vec<usize> = (0..cols).filter(|&i| row[i].is_finite()).collect();
        if present.is_empty() {
            continue;
        }
        let mean = present.iter().map(|&i| row[i]).sum::<f64>() / present.len() as f64;
        let demeaned: Vec<f64> = present.iter().map(|&i| row[i] - mean).collect();
        let gross: f64 = demeaned.iter().map(|d| d.abs()).sum();
        if gross == 0.0 || !gross.is_finite() {
            continue;
        }
        let target = &mut out[t * cols..(t + 1) * cols];
        for (&i, d) in present.iter().zip(&demeaned) {
            target[i] = d / gross;
        }
        // Remove the rounding residue of the division from the largest
        // position so the row sums to zero as tightly as floating point allows.
        let residue: f64 = target.iter().sum();
        if residue != 0.0 {
            let (k, _) = present
                .iter()
                .map(|&i| (i, target[i].abs()))
                .fold((present[0], -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            target[k] -= residue;
        }
    }
    WeightMatrix {
        weights: alpha.with_values(out),
    }
}

/// Daily simulation output. Index `t` refers to calendar day `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// `pnl[t]` is earned by the book held from day `t - 1` to day `t`;
    /// `pnl[0]` is NaN.
    pub daily_pnl: Vec<f64>,
    /// Buys plus sells at the day-`t` rebalance, in currency.
    pub daily_traded_dollars: Vec<f64>,
    pub daily_traded_shares: Vec<f64>,
    pub book_size: f64,
    pub delay_class: DelayClass,
    /// First day that counts toward statistics: the day after the first
    /// nonzero book. The establishing trade and idle leading days are excluded.
    pub active_from: usize,
}

impl SimResult {
    /// Daily return on book, NaN before `active_from`.
    pub fn daily_returns(&self) -> Vec<f64> {
        self.daily_pnl
            .iter()
            .enumerate()
            .map(|(t, p)| {
                if t < self.active_from {
                    f64::NAN
                } else {
                    p / self.book_size
                }
            })
            .collect()
    }
}

/// Hold `weights` at a constant `book_size` and record P&L and trading.
///
/// Delay-0 and delay-1 alphas share the same close-to-close arithmetic;
/// `delay_class` is carried through as metadata.
pub fn simulate(
    weights: &WeightMatrix,
    market: &MarketData,
    delay_class: DelayClass,
    book_size: f64,
) -> Result<SimResult, BacktestError> {
    if !(book_size > 0.0 && book_size.is_finite()) {
        return Err(BacktestError::BookSize(book_size));
    }
    let w = weights.weights();
    if w.rows() != market.days()
        || w.cols() != market.universe().len()
        || w.calendar().dates() != market.calendar().dates()
        || w.universe().assets() != market.universe().assets()
    {
        return Err(BacktestError::Misaligned);
    }
    let (days, cols) = (w.rows(), w.cols());
    let returns = market.returns();
    let close = market.close();

    let mut pnl = vec![f64::NAN; days];
    let mut traded = vec![0.0; days];
    let mut shares = vec![0.0; days];
    for t in 0..days {
        let today = w.row(t);
        if t > 0 {
            let held = w.row(t - 1);
            let r = returns.row(t);
            let mut sum = 0.0;
            for i in 0..cols {
                if held[i] != 0.0 {
                    sum += held[i] * r[i];
                }
            }
            pnl[t] = book_size * sum;
        }
        let mut dollars = 0.0;
        let mut count = 0.0;
        for i in 0..cols {
            let prev = if t > 0 { w.get(t - 1, i) } else { 0.0 };
            let delta = (today[i] - prev).abs();
            if delta != 0.0 {
                dollars += delta;
                count += book_size * delta / close.get(t, i);
            }
        }
        traded[t] = book_size * dollars;
        shares[t] = count;
    }
    let active_from = weights.first_active_day().map_or(days, |t| t + 1);
    Ok(SimResult {
        daily_pnl: pnl,
        daily_traded_dollars: traded,
        daily_traded_shares: shares,
        book_size,
        delay_class,
        active_from,
    })
}

/// Performance summary of one simulated alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaStats {
    /// Annualized Sharpe ratio.
    pub sharpe: f64,
    /// Mean daily traded dollars over book.
    pub turnover: f64,
    /// `1 / turnover`, in days.
    pub holding_period: f64,
    /// Mean daily P&L over mean daily shares traded, in cents.
    pub cents_per_share: f64,
    /// Sample standard deviation of daily return on book.
    pub daily_vol: f64,
    /// 252 times the mean daily return on book.
    pub ann_return: f64,
    /// Days that entered the statistics.
    pub days: usize,
}

impl AlphaStats {
    /// Placeholder for an alpha that never held a position long enough to
    /// be measured.
    pub fn undefined() -> Self {
        Self {
            sharpe: f64::NAN,
            turnover: f64::NAN,
            holding_period: f64::NAN,
            cents_per_share: f64::NAN,
            daily_vol: f64::NAN,
            ann_return: f64::NAN,
            days: 0,
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (denominator `n - 1`).
fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn ratio(num: f64, den: f64) -> f64 {
    let r = num / den;
    if r.is_finite() {
        r
    } else {
        f64::NAN
    }
}

/// Statistics over days `active_from..` whose P&L is finite.
pub fn compute_stats(sim: &SimResult) -> Result<AlphaStats, BacktestError> {
    let valid: Vec<usize> = (sim.active_from..sim.daily_pnl.len())
        .filter(|&t| sim.daily_pnl[t].is_finite())
        .collect();
    if valid.len() < 2 {
        return Err(BacktestError::InsufficientData {
            required: 2,
            available: valid.len(),
        });
    }
    let book = sim.book_size;
    let pnl: Vec<f64> = valid.iter().map(|&t| sim.daily_pnl[t]).collect();
    let traded: Vec<f64> = valid
        .iter()
        .map(|&t| sim.daily_traded_dollars[t])
        .filter(|v| v.is_finite())
        .collect();
    let shares: Vec<f64> = valid
        .iter()
        .map(|&t| sim.daily_traded_shares[t])
        .filter(|v| v.is_finite())
        .collect();
    let returns: Vec<f64> = pnl.iter().map(|p| p / book).collect();

    let p = mean(&pnl);
    let v = sample_std(&pnl);
    let turnover = if traded.is_empty() {
        f64::NAN
    } else {
        mean(&traded) / book
    };
    let q = if shares.is_empty() {
        f64::NAN
    } else {
        mean(&shares)
    };
    Ok(AlphaStats {
        sharpe: if v == 0.0 {
            f64::NAN
        } else {
            ratio(TRADING_DAYS.sqrt() * p, v)
        },
        turnover,
        holding_period: ratio(1.0, turnover),
        cents_per_share: ratio(100.0 * p, q),
        daily_vol: sample_std(&returns),
        ann_return: TRADING_DAYS * mean(&returns),
        days: valid.len(),
    })
}

/// Pairwise correlations of alpha daily returns.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCorrMatrix {
    pub ids: Vec<u32>,
    /// Row-major `n x n`.
    pub psi: Vec<f64>,
    /// Per-alpha sample standard deviation over the common days.
    pub sigma: Vec<f64>,
    /// Number of common valid days used.
    pub observations: usize,
}

impl AlphaCorrMatrix {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.psi[i * self.ids.len() + j]
    }
}

/// Sample covariance of daily returns over the days on which every series
/// is finite, normalized to correlations. The diagonal is exactly one. An
/// alpha with zero variance gets NaN off the diagonal.
pub fn alpha_corr_matrix(
    series: &BTreeMap<u32, Vec<f64>>,
) -> Result<AlphaCorrMatrix, BacktestError> {
    let ids: Vec<u32> = series.keys().copied().collect();
    let n = ids.len();
    let len = series.values().next().map_or(0, Vec::len);
    for (&id, s) in series {
        if s.len() != len {
            return Err(BacktestError::SeriesLength {
                id,
                len: s.len(),
                expected: len,
            });
        }
    }
    let days: Vec<usize> = (0..len)
        .filter(|&t| series.values().all(|s| s[t].is_finite()))
        .collect();
    if days.len() < 2 {
        return Err(BacktestError::InsufficientData {
            required: 2,
            available: days.len(),
        });
    }
    let centered: Vec<Vec<f64>> = series
        .values()
        .map(|s| {
            let m = days.iter().map(|&t| s[t]).sum::<f64>() / days.len() as f64;
            days.iter().map(|&t| s[t] - m).collect()
        })
        .collect();
    let denom = (days.len() - 1) as f64;
    let cov = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / denom;
    let sigma: Vec<f64> = centered.iter().map(|c| cov(c, c).sqrt()).collect();

    let mut psi = vec![f64::NAN; n * n];
    for i in 0..n {
        psi[i * n + i] = 1.0;
        for j in 0..i {
            let value = if sigma[i] > 0.0 && sigma[j] > 0.0 {
                (cov(&centered[i], &centered[j]) / (sigma[i] * sigma[j])).clamp(-1.0, 1.0)
            } else {
                f64::NAN
            };
            psi[i * n + j] = value;
            psi[j * n + i] = value;
        }
    }
    Ok(AlphaCorrMatrix {
        ids,
        psi,
        sigma,
        observations: days.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{IndustryMap, MarketPanels};
    use crate::test_support::row_panel;

    fn assert_row(w: &WeightMatrix, expected: &[f64]) {
        for (a, b) in w.weights().row(0).iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn weights_from_ranks() {
        assert_row(&alpha_to_weights(&row_panel(&[1.0, 2.0, 3.0])), &[-0.5, 0.0, 0.5]);
        assert_row(&alpha_to_weights(&row_panel(&[4.0, f64::NAN, 6.0])), &[-0.5, 0.0, 0.5]);
        assert_row(&alpha_to_weights(&row_panel(&[2.0, 2.0, 2.0])), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_long_only_book() {
        let err = WeightMatrix::new(row_panel(&[1.0])).unwrap_err();
        assert!(err.to_string().contains("neutrality"));
    }

    /// Market of `days` rows over two assets with given close prices.
    fn two_asset_market(closes: &[[f64; 2]]) -> MarketData {
        let flat: Vec<f64> = closes.iter().flatten().copied().collect();
        let p = || Panel::from_values(closes.len(), 2, flat.clone()).unwrap();
        MarketData::new(
            MarketPanels {
                open: p(),
                high: p(),
                low: p(),
                close: p(),
                volume: Panel::from_values(closes.len(), 2, vec![1.0; flat.len()]).unwrap(),
                vwap: p(),
                cap: None,
                returns: None,
            },
            IndustryMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn two_asset_pnl() {
        let market = two_asset_market(&[[100.0, 100.0], [99.0, 103.0]]);
        let w = WeightMatrix::new(Panel::from_values(2, 2, vec![-0.5, 0.5, -0.5, 0.5]).unwrap())
            .unwrap();
        let sim = simulate(&w, &market, DelayClass::One, 1e6).unwrap();
        assert!((sim.daily_pnl[1] - 20000.0).abs() < 1e-6);
        assert_eq!(sim.daily_traded_dollars[1], 0.0);
        assert_eq!(sim.daily_traded_dollars[0], 1e6);
        assert_eq!(sim.active_from, 1);
    }

    #[test]
    fn stats_degenerate_and_identity() {
        let sim = SimResult {
            daily_pnl: vec![f64::NAN, 5.0, 5.0, 5.0],
            daily_traded_dollars: vec![100.0; 4],
            daily_traded_shares: vec![1.0; 4],
            book_size: 100.0,
            delay_class: DelayClass::One,
            active_from: 1,
        };
        let s = compute_stats(&sim).unwrap();
        assert!(s.sharpe.is_nan());
        assert_eq!(s.turnover, 1.0);
        assert_eq!(s.holding_period, 1.0);
    }

    #[test]
    fn corr_matrix_simple_cases() {
        let a = vec![0.01, -0.02, 0.03, 0.0, 0.015];
        let series = BTreeMap::from([
            (1, a.clone()),
            (2, a.clone()),
            (3, a.iter().map(|x| -x).collect()),
            (4, vec![0.01; 5]),
        ]);
        let m = alpha_corr_matrix(&series).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(0, 2), -1.0);
        assert!(m.get(3, 0).is_nan());
        assert_eq!(m.get(3, 3), 1.0);
    }
}
