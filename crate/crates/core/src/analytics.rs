//! Least squares with classical diagnostics, and the cross-sectional
//! regressions relating alpha returns, volatility, turnover and pairwise
//! correlation.

use thiserror::Error;

use crate::backtest::{AlphaCorrMatrix, AlphaStats};

/// Name given to the constant column when a fit includes an intercept.
pub const INTERCEPT: &str = "Intercept";

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("need more observations than regressors plus one: {observations} observations, {regressors} regressors")]
    TooFewObservations {
        observations: usize,
        regressors: usize,
    },
    #[error("regressor `{name}` has length {len}, expected {expected}")]
    Length {
        name: String,
        len: usize,
        expected: usize,
    },
    #[error("design matrix is rank deficient: {} depend on earlier columns", .dependent.join(", "))]
    RankDeficient { dependent: Vec<String> },
    #[error("non-finite value in `{0}`")]
    NonFinite(String),
    #[error("only {usable} alphas usable for log regression (need at least 3); excluded: {excluded:?}")]
    TooFewAlphas { usable: usize, excluded: Vec<u32> },
    #[error("turnover of alpha at position {index} is {value}, must be positive")]
    NonPositiveTurnover { index: usize, value: f64 },
    #[error("need at least 3 alphas, got {0}")]
    TooFewTurnovers(usize),
    #[error("correlation matrix has {matrix} alphas but {turnover} turnovers were given")]
    Dimension { matrix: usize, turnover: usize },
    #[error("no values to summarize")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_statistic: f64,
    pub observations: usize,
    /// Residual degrees of freedom.
    pub df_residual: usize,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }
}

/// Ordinary least squares by Householder QR.
///
/// Standard errors come from `s² (XᵀX)⁻¹` with `s² = RSS / (n - k)`, where
/// `k` counts the intercept. With an intercept, R² is centered and F tests
/// all slopes against the intercept-only model. Without one, both are taken
/// about zero.
pub fn ols_fit(
    y: &[f64],
    regressors: &[(&str, &[f64])],
    include_intercept: bool,
) -> Result<RegressionResult, AnalyticsError> {
    let n = y.len();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(AnalyticsError::NonFinite("response".into()));
    }
    let mut names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    if include_intercept {
        names.push(INTERCEPT.to_string());
        columns.push(vec![1.0; n]);
    }
    for (name, values) in regressors {
        if values.len() != n {
            return Err(AnalyticsError::Length {
                name: name.to_string(),
                len: values.len(),
                expected: n,
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AnalyticsError::NonFinite(name.to_string()));
        }
        names.push(name.to_string());
        columns.push(values.to_vec());
    }
    let k = columns.len();
    if n <= regressors.len() + 1 || k == 0 {
        return Err(AnalyticsError::TooFewObservations {
            observations: n,
            regressors: regressors.len(),
        });
    }

    let column_norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let (r, qty) = householder_qr(columns, y.to_vec());
    let dependent: Vec<String> = (0..k)
        .filter(|&j| r[j][j].abs() <= 1e-10 * column_norms[j].max(f64::MIN_POSITIVE))
        .map(|j| names[j].clone())
        .collect();
    if !dependent.is_empty() {
        return Err(AnalyticsError::RankDeficient { dependent });
    }

    // Back substitution for beta, and R⁻¹ for the covariance.
    let mut beta = vec![0.0; k];
    for j in (0..k).rev() {
        let s: f64 = (j + 1..k).map(|c| r[j][c] * beta[c]).sum();
        beta[j] = (qty[j] - s) / r[j][j];
    }
    let mut r_inv = vec![vec![0.0; k]; k];
    for c in 0..k {
        r_inv[c][c] = 1.0 / r[c][c];
        for j in (0..c).rev() {
            let s: f64 = (j + 1..=c).map(|m| r[j][m] * r_inv[m][c]).sum();
            r_inv[j][c] = -s / r[j][j];
        }
    }

    let fitted = |t: usize| -> f64 {
        let mut v = 0.0;
        let mut col = 0;
        if include_intercept {
            v += beta[0];
            col = 1;
        }
        for (j, (_, values)) in regressors.iter().enumerate() {
            v += beta[col + j] * values[t];
        }
        v
    };
    let rss: f64 = (0..n).map(|t| (y[t] - fitted(t)).powi(2)).sum();
    let df = n - k;
    let s2 = rss / df as f64;
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let tss = if include_intercept {
        y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = 1.0 - rss / tss;
    let model_df = if include_intercept { k - 1 } else { k };
    let base_df = if include_intercept { n - 1 } else { n };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * base_df as f64 / df as f64;
    let f_statistic = if model_df == 0 {
        f64::NAN
    } else {
        ((tss - rss) / model_df as f64) / s2
    };

    let coefficients = (0..k)
        .map(|j| {
            // Diagonal of R⁻¹R⁻ᵀ.
            let var: f64 = (j..k).map(|c| r_inv[j][c] * r_inv[j][c]).sum::<f64>() * s2;
            let std_error = var.sqrt();
            Coefficient {
                name: names[j].clone(),
                estimate: beta[j],
                std_error,
                t_stat: beta[j] / std_error,
            }
        })
        .collect();
    Ok(RegressionResult {
        coefficients,
        r_squared,
        adj_r_squared,
        f_statistic,
        observations: n,
        df_residual: df,
    })
}

/// Reduce column-major `a` (n x k) to upper-triangular R in place, applying
/// the same reflections to `b`. Returns the leading k x k block of R (row
/// major) and the first k entries of Qᵀb.
fn householder_qr(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = a.len();
    let n = b.len();
    for j in 0..k {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let v_norm2: f64 = v.iter().map(|x| x * x).sum();
        if v_norm2 == 0.0 {
            continue;
        }
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / v_norm2;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= f * vi;
            }
        };
        for col in a.iter_mut().skip(j) {
            reflect(&mut col[j..n]);
        }
        reflect(&mut b[j..n]);
    }
    let r = (0..k)
        .map(|row| (0..k).map(|col| if col >= row { a[col][row] } else { 0.0 }).collect())
        .collect();
    (r, b[..k].to_vec())
}

/// A log-space regression over alphas together with the alphas left out.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRegression {
    pub result: RegressionResult,
    /// Alphas with a non-positive or undefined quantity that the log needs.
    pub excluded: Vec<u32>,
}

fn usable_logs(
    stats: &[(u32, AlphaStats)],
    fields: &[fn(&AlphaStats) -> f64],
) -> (Vec<Vec<f64>>, Vec<u32>) {
    let mut columns = vec![Vec::new(); fields.len()];
    let mut excluded = Vec::new();
    for (id, s) in stats {
        let values: Vec<f64> = fields.iter().map(|f| f(s)).collect();
        if values.iter().all(|v| v.is_finite() && *v > 0.0) {
            for (c, v) in columns.iter_mut().zip(values) {
                c.push(v.ln());
            }
        } else {
            excluded.push(*id);
        }
    }
    if !excluded.is_empty() {
        log::warn!("excluded from log regression: {excluded:?}");
    }
    (columns, excluded)
}

/// Regress ln(R) on ln(σ), and on ln(T) as well when `include_turnover`.
/// R is the mean daily return on book.
pub fn regress_return_vol(
    stats: &[(u32, AlphaStats)],
    include_turnover: bool,
) -> Result<AlphaRegression, AnalyticsError> {
    let fields: Vec<fn(&AlphaStats) -> f64> = vec![
        |s| s.ann_return / crate::backtest::TRADING_DAYS,
        |s| s.daily_vol,
        |s| s.turnover,
    ];
    let (columns, excluded) = usable_logs(stats, &fields);
    if columns[0].len() < 3 {
        return Err(AnalyticsError::TooFewAlphas {
            usable: columns[0].len(),
            excluded,
        });
    }
    let mut regressors: Vec<(&str, &[f64])> = vec![("ln(sigma)", &columns[1])];
    if include_turnover {
        regressors.push(("ln(T)", &columns[2]));
    }
    Ok(AlphaRegression {
        result: ols_fit(&columns[0], &regressors, true)?,
        excluded,
    })
}

/// Regress ln(σ) on ln(T).
pub fn regress_vol_on_turnover(
    stats: &[(u32, AlphaStats)],
) -> Result<AlphaRegression, AnalyticsError> {
    let fields: Vec<fn(&AlphaStats) -> f64> = vec![|s| s.daily_vol, |s| s.turnover];
    let (columns, excluded) = usable_logs(stats, &fields);
    if columns[0].len() < 3 {
        return Err(AnalyticsError::TooFewAlphas {
            usable: columns[0].len(),
            excluded,
        });
    }
    Ok(AlphaRegression {
        result: ols_fit(&columns[0], &[("ln(T)", &columns[1])], true)?,
        excluded,
    })
}

/// Pairwise turnover combinations over alpha pairs `(i, j)` with `i > j`,
/// enumerated as `for i in 1..n { for j in 0..i }`.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnoverTensors {
    /// Demeaned log turnover per alpha.
    pub log_turnover: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub x: Vec<f64>,
    /// `ℓ_i + ℓ_j`.
    pub y: Vec<f64>,
    /// `ℓ_i · ℓ_j`.
    pub z: Vec<f64>,
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

pub fn lower_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect()
}

pub fn build_turnover_tensors(turnover: &[f64]) -> Result<TurnoverTensors, AnalyticsError> {
    if turnover.len() < 3 {
        return Err(AnalyticsError::TooFewTurnovers(turnover.len()));
    }
    if let Some((index, &value)) = turnover
        .iter()
        .enumerate()
        .find(|(_, t)| !(t.is_finite() && **t > 0.0))
    {
        return Err(AnalyticsError::NonPositiveTurnover { index, value });
    }
    let logs: Vec<f64> = turnover.iter().map(|t| t.ln()).collect();
    let m = logs.iter().sum::<f64>() / logs.len() as f64;
    let ell: Vec<f64> = logs.iter().map(|l| l - m).collect();
    let pairs = lower_pairs(turnover.len());
    let y = pairs.iter().map(|&(i, j)| ell[i] + ell[j]).collect();
    let z = pairs.iter().map(|&(i, j)| ell[i] * ell[j]).collect();
    Ok(TurnoverTensors {
        x: vec![1.0; pairs.len()],
        log_turnover: ell,
        pairs,
        y,
        z,
    })
}

/// Regress the strict lower triangle of Ψ on the turnover tensors with an
/// intercept. `turnover[k]` belongs to alpha `psi.ids[k]`.
///
/// `y` and `z` are centered over the pairs used before fitting. This leaves
/// the slopes unchanged and makes the intercept the mean pairwise
/// correlation. Pairs whose correlation is undefined are skipped.
pub fn regress_corr_on_turnover(
    psi: &AlphaCorrMatrix,
    turnover: &[f64],
) -> Result<RegressionResult, AnalyticsError> {
    if psi.len() != turnover.len() {
        return Err(AnalyticsError::Dimension {
            matrix: psi.len(),
            turnover: turnover.len(),
        });
    }
    let tensors = build_turnover_tensors(turnover)?;
    let keep: Vec<usize> = (0..tensors.pairs.len())
        .filter(|&a| {
            let (i, j) = tensors.pairs[a];
            psi.get(i, j).is_finite()
        })
        .collect();
    let response: Vec<f64> = keep
        .iter()
        .map(|&a| {
            let (i, j) = tensors.pairs[a];
            psi.get(i, j)
        })
        .collect();
    let centered = |v: &[f64]| -> Vec<f64> {
        let picked: Vec<f64> = keep.iter().map(|&a| v[a]).collect();
        let m = picked.iter().sum::<f64>() / picked.len().max(1) as f64;
        picked.iter().map(|x| x - m).collect()
    };
    let y = centered(&tensors.y);
    let z = centered(&tensors.z);
    ols_fit(&response, &[("y", &y), ("z", &z)], true)
}

/// Six-number summary with linearly interpolated quartiles: the `p`
/// quantile of sorted `v[0..n]` is read at position `p (n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn as_array(&self) -> [f64; 6] {
        [self.min, self.q1, self.median, self.mean, self.q3, self.max]
    }
}

/// Summarize the finite entries of `values`.
pub fn summarize_quantiles(values: &[f64]) -> Result<Quantiles, AnalyticsError> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return Err(AnalyticsError::Empty);
    }
    v.sort_by(f64::total_cmp);
    let quantile = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    Ok(Quantiles {
        min: v[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        mean: v.iter().sum::<f64>() / v.len() as f64,
        q3: quantile(0.75),
        max: v[v.len() - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let fit = ols_fit(&y, &[("x", &x)], true).unwrap();
        assert!((fit.coefficients[0].estimate - 2.0).abs() < 1e-10);
        assert!((fit.coefficients[1].estimate - 3.0).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_regressor() {
        let x = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let y = [1.0, 1.0, -1.0, -1.0, 0.0, 0.0];
        let fit = ols_fit(&y, &[("x", &x)], true).unwrap();
        assert!(fit.coefficients[1].estimate.abs() < 1e-12);
        assert!(fit.coefficients[1].t_stat.abs() < 1e-10);
    }

    #[test]
    fn known_textbook_values() {
        // y = [1, 3, 2, 5, 4] on x = [1..5]: slope 0.8, intercept 0.6.
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [1.0, 3.0, 2.0, 5.0, 4.0];
        let fit = ols_fit(&y, &[("x", &x)], true).unwrap();
        assert!((fit.coefficients[0].estimate - 0.6).abs() < 1e-12);
        assert!((fit.coefficients[1].estimate - 0.8).abs() < 1e-12);
        // RSS = 3.6, s² = 1.2, Sxx = 10: se(slope) = sqrt(0.12).
        assert!((fit.coefficients[1].std_error - 0.12f64.sqrt()).abs() < 1e-12);
        assert!((fit.r_squared - 0.64).abs() < 1e-12);
        // F = (6.4 / 1) / 1.2.
        assert!((fit.f_statistic - 6.4 / 1.2).abs() < 1e-10);
        assert!(fit.adj_r_squared <= fit.r_squared);
    }

    #[test]
    fn rank_deficiency_names_columns() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let x2 = [2.0, 4.0, 6.0, 8.0, 10.0];
        let y = [1.0, 0.0, 2.0, 1.0, 3.0];
        let err = ols_fit(&y, &[("a", &x), ("b", &x2)], true).unwrap_err();
        assert_eq!(
            err,
            AnalyticsError::RankDeficient {
                dependent: vec!["b".into()]
            }
        );
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(
            ols_fit(&[1.0, 2.0], &[("x", &[0.0, 1.0])], true),
            Err(AnalyticsError::TooFewObservations { .. })
        ));
    }

    #[test]
    fn tensors_hand_example() {
        let e = std::f64::consts::E;
        let t = build_turnover_tensors(&[e.powi(-1), 1.0, e]).unwrap();
        assert_eq!(t.pairs, vec![(1, 0), (2, 0), (2, 1)]);
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(&t.y, &[-1.0, 0.0, 1.0]));
        assert!(close(&t.z, &[0.0, -1.0, 0.0]));
        let flat = build_turnover_tensors(&[e, e, e]).unwrap();
        assert!(flat.y.iter().chain(&flat.z).all(|v| *v == 0.0));
    }

    #[test]
    fn tensor_errors() {
        assert!(matches!(
            build_turnover_tensors(&[1.0, 0.0, 2.0]),
            Err(AnalyticsError::NonPositiveTurnover { index: 1, .. })
        ));
        assert_eq!(pair_count(101), 5050);
    }

    #[test]
    fn quantiles_one_to_five() {
        let q = summarize_quantiles(&[5.0, 3.0, 1.0, 4.0, 2.0]).unwrap();
        assert_eq!(q.as_array(), [1.0, 2.0, 3.0, 3.0, 4.0, 5.0]);
        let single = summarize_quantiles(&[7.5]).unwrap();
        assert!(single.as_array().iter().all(|&v| v == 7.5));
        assert_eq!(summarize_quantiles(&[]), Err(AnalyticsError::Empty));
    }
}
