//! Text and CSV output: per-alpha statistics, the correlation matrix, alpha
//! values, and an analysis report laid out like the published summary
//! tables, with the published numbers alongside for visual comparison.

use std::fmt::Write as _;
use std::io;

use std::collections::BTreeMap;

use crate::analytics::{
    lower_pairs, regress_corr_on_turnover, regress_return_vol, regress_vol_on_turnover,
    summarize_quantiles, AlphaRegression, Quantiles, RegressionResult,
};
use crate::backtest::{alpha_corr_matrix, AlphaCorrMatrix, AlphaStats};
use crate::corpus::DelayClass;
use crate::data::Panel;

/// One row of the statistics export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsRow {
    pub id: u32,
    pub delay: DelayClass,
    pub stats: AlphaStats,
}

pub fn write_stats_csv<W: io::Write>(out: W, rows: &[StatsRow]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "id",
        "delay",
        "S",
        "T",
        "holding_period",
        "C",
        "sigma",
        "ann_return",
    ])?;
    for row in rows {
        let s = &row.stats;
        w.write_record([
            row.id.to_string(),
            row.delay.to_string(),
            s.sharpe.to_string(),
            s.turnover.to_string(),
            s.holding_period.to_string(),
            s.cents_per_share.to_string(),
            s.daily_vol.to_string(),
            s.ann_return.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Square matrix with alpha ids labelling rows and columns.
pub fn write_corr_csv<W: io::Write>(out: W, psi: &AlphaCorrMatrix) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend(psi.ids.iter().map(u32::to_string));
    w.write_record(&header)?;
    for (i, id) in psi.ids.iter().enumerate() {
        let mut record = vec![id.to_string()];
        record.extend((0..psi.len()).map(|j| psi.get(i, j).to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Long format: date, asset, value. Missing values are written as `NaN`.
pub fn write_values_csv<W: io::Write>(out: W, values: &Panel) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "asset", "value"])?;
    let dates = values.calendar().dates();
    let assets = values.universe().assets();
    for t in 0..values.rows() {
        let date = dates[t].to_string();
        for (i, asset) in assets.iter().enumerate() {
            w.write_record([date.as_str(), asset.as_str(), &values.get(t, i).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Everything that goes into the analysis report. Regressions that could
/// not be run carry the reason instead.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub alphas: usize,
    pub stats: Vec<StatsRow>,
    pub psi: Option<AlphaCorrMatrix>,
    pub return_vol: Result<AlphaRegression, String>,
    pub return_vol_turnover: Result<AlphaRegression, String>,
    pub corr_turnover: Result<RegressionResult, String>,
    pub vol_turnover: Result<AlphaRegression, String>,
}

impl AnalysisReport {
    /// Run the cross-sectional analyses on per-alpha statistics and daily
    /// return series keyed by the same ids.
    pub fn build(stats: Vec<StatsRow>, daily_returns: &BTreeMap<u32, Vec<f64>>) -> Self {
        let psi = alpha_corr_matrix(daily_returns).ok();
        let pairs: Vec<(u32, AlphaStats)> = stats.iter().map(|r| (r.id, r.stats)).collect();
        let corr_turnover = match &psi {
            Some(psi) => {
                let turnover: Vec<f64> = psi
                    .ids
                    .iter()
                    .map(|id| {
                        pairs
                            .iter()
                            .find(|(k, _)| k == id)
                            .map_or(f64::NAN, |(_, s)| s.turnover)
                    })
                    .collect();
                regress_corr_on_turnover(psi, &turnover).map_err(|e| e.to_string())
            }
            None => Err("correlation matrix unavailable".to_string()),
        };
        Self {
            alphas: stats.len(),
            return_vol: regress_return_vol(&pairs, false).map_err(|e| e.to_string()),
            return_vol_turnover: regress_return_vol(&pairs, true).map_err(|e| e.to_string()),
            vol_turnover: regress_vol_on_turnover(&pairs).map_err(|e| e.to_string()),
            corr_turnover,
            psi,
            stats,
        }
    }
}

fn summary_lines(report: &AnalysisReport) -> Vec<(&'static str, Option<Quantiles>)> {
    let col = |f: fn(&AlphaStats) -> f64| -> Option<Quantiles> {
        let values: Vec<f64> = report.stats.iter().map(|r| f(&r.stats)).collect();
        summarize_quantiles(&values).ok()
    };
    let pairwise = report.psi.as_ref().and_then(|psi| {
        let values: Vec<f64> = lower_pairs(psi.len())
            .into_iter()
            .map(|(i, j)| 100.0 * psi.get(i, j))
            .collect();
        summarize_quantiles(&values).ok()
    });
    vec![
        ("S", col(|s| s.sharpe)),
        ("T", col(|s| s.turnover)),
        ("1/T", col(|s| s.holding_period)),
        ("C", col(|s| s.cents_per_share)),
        ("10^3 x sigma", col(|s| 1e3 * s.daily_vol)),
        ("100% x R~", col(|s| 100.0 * s.ann_return)),
        ("100% x Psi_ij", pairwise),
    ]
}

const SUMMARY_HEADER: [&str; 7] = [
    "Quantity",
    "Minimum",
    "1st Quartile",
    "Median",
    "Mean",
    "3rd Quartile",
    "Maximum",
];

fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.4}")
    }
}

fn write_summary_table(out: &mut String, rows: &[(&str, [Option<f64>; 6])]) {
    let _ = writeln!(
        out,
        "{:<16}{:>14}{:>14}{:>14}{:>14}{:>14}{:>14}",
        SUMMARY_HEADER[0],
        SUMMARY_HEADER[1],
        SUMMARY_HEADER[2],
        SUMMARY_HEADER[3],
        SUMMARY_HEADER[4],
        SUMMARY_HEADER[5],
        SUMMARY_HEADER[6]
    );
    for (name, values) in rows {
        let _ = write!(out, "{name:<16}");
        for v in values {
            let cell = v.map_or_else(|| "-".to_string(), fmt_num);
            let _ = write!(out, "{cell:>14}");
        }
        out.push('\n');
    }
}

fn write_regression_table(out: &mut String, fit: &RegressionResult) {
    let _ = writeln!(
        out,
        "{:<16}{:>14}{:>16}{:>14}",
        "", "Estimate", "Standard error", "t-statistic"
    );
    for c in &fit.coefficients {
        let _ = writeln!(
            out,
            "{:<16}{:>14}{:>16}{:>14}",
            c.name,
            fmt_num(c.estimate),
            fmt_num(c.std_error),
            fmt_num(c.t_stat)
        );
    }
    let _ = writeln!(
        out,
        "Mult./Adj. R-squared: {} / {}",
        fmt_num(fit.r_squared),
        fmt_num(fit.adj_r_squared)
    );
    if fit.observations > 0 {
        let _ = writeln!(
            out,
            "F-statistic: {} (observations {})",
            fmt_num(fit.f_statistic),
            fit.observations
        );
    } else {
        let _ = writeln!(out, "F-statistic: {}", fmt_num(fit.f_statistic));
    }
}

struct Section<'a> {
    title: &'static str,
    fit: Result<&'a RegressionResult, &'a str>,
    excluded: &'a [u32],
    reference: &'static GoldenRegression,
}

type Fit<'a> = (Result<&'a RegressionResult, &'a str>, &'a [u32]);

fn of(r: &Result<AlphaRegression, String>) -> Fit<'_> {
    match r {
        Ok(a) => (Ok(&a.result), a.excluded.as_slice()),
        Err(e) => (Err(e.as_str()), &[]),
    }
}

fn sections(report: &AnalysisReport) -> Vec<Section<'_>> {
    let (t2, e2) = of(&report.return_vol);
    let (t3, e3) = of(&report.return_vol_turnover);
    let (t5, e5) = of(&report.vol_turnover);
    let t4 = report
        .corr_turnover
        .as_ref()
        .map_err(String::as_str);
    vec![
        Section {
            title: "Regression of ln(R) over ln(sigma) with intercept",
            fit: t2,
            excluded: e2,
            reference: &GOLDEN_REGRESSIONS[0],
        },
        Section {
            title: "Regression of ln(R) over ln(sigma) and ln(T) with intercept",
            fit: t3,
            excluded: e3,
            reference: &GOLDEN_REGRESSIONS[1],
        },
        Section {
            title: "Regression of Psi_a over y_a and z_a with intercept",
            fit: t4,
            excluded: &[],
            reference: &GOLDEN_REGRESSIONS[2],
        },
        Section {
            title: "Regression of ln(sigma) over ln(T) with intercept",
            fit: t5,
            excluded: e5,
            reference: &GOLDEN_REGRESSIONS[3],
        },
    ]
}

/// Plain-text report. Each computed table is followed by the published
/// reference values, which come from proprietary data and are not expected
/// to match.
pub fn render_text_report(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Alpha analysis report ({} alphas)\n", report.alphas);
    let _ = writeln!(out, "Table 1. Summary of per-alpha statistics");
    let rows: Vec<(&str, [Option<f64>; 6])> = summary_lines(report)
        .into_iter()
        .map(|(name, q)| (name, q.map_or([None; 6], |q| q.as_array().map(Some))))
        .collect();
    write_summary_table(&mut out, &rows);
    let _ = writeln!(out, "\n  Published reference (not reproducible):");
    let golden: Vec<(&str, [Option<f64>; 6])> = GOLDEN_SUMMARY
        .iter()
        .map(|(name, values)| (*name, values.map(Some)))
        .collect();
    write_summary_table(&mut out, &golden);

    for (k, section) in sections(report).iter().enumerate() {
        let _ = writeln!(out, "\nTable {}. {}", k + 2, section.title);
        match section.fit {
            Ok(fit) => write_regression_table(&mut out, fit),
            Err(reason) => {
                let _ = writeln!(out, "not computed: {reason}");
            }
        }
        if !section.excluded.is_empty() {
            let _ = writeln!(out, "Excluded alphas: {:?}", section.excluded);
        }
        let _ = writeln!(out, "\n  Published reference (not reproducible):");
        write_regression_table(&mut out, &section.reference.to_result());
    }
    out
}

/// Regression tables in long CSV form: one row per coefficient.
pub fn write_regressions_csv<W: io::Write>(out: W, report: &AnalysisReport) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "table",
        "term",
        "estimate",
        "std_error",
        "t_stat",
        "r_squared",
        "adj_r_squared",
        "f_statistic",
        "observations",
    ])?;
    for (k, section) in sections(report).iter().enumerate() {
        if let Ok(fit) = section.fit {
            for c in &fit.coefficients {
                w.write_record([
                    (k + 2).to_string(),
                    c.name.clone(),
                    c.estimate.to_string(),
                    c.std_error.to_string(),
                    c.t_stat.to_string(),
                    fit.r_squared.to_string(),
                    fit.adj_r_squared.to_string(),
                    fit.f_statistic.to_string(),
                    fit.observations.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Published six-number summaries, in the units of the report rows.
pub const GOLDEN_SUMMARY: [(&str, [f64; 6]); 7] = [
    ("S", [1.238, 1.929, 2.224, 2.265, 2.498, 4.162]),
    ("T", [0.1571, 0.3429, 0.4752, 0.5456, 0.6474, 1.604]),
    ("1/T", [0.6235, 1.545, 2.104, 2.391, 2.916, 6.365]),
    ("C", [0.1324, 0.3125, 0.3969, 0.4814, 0.5073, 2.031]),
    ("10^3 x sigma", [0.9318, 1.194, 1.395, 1.747, 2.019, 10.44]),
    ("100% x R~", [3.285, 4.4, 5.441, 6.015, 6.296, 28.72]),
    ("100% x Psi_ij", [-15.09, 7.457, 14.31, 15.86, 22.91, 87.33]),
];

/// A published regression table.
#[derive(Debug, Clone, Copy)]
pub struct GoldenRegression {
    /// (term, estimate, standard error, t-statistic)
    pub terms: &'static [(&'static str, f64, f64, f64)],
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_statistic: f64,
}

impl GoldenRegression {
    fn to_result(self) -> RegressionResult {
        RegressionResult {
            coefficients: self
                .terms
                .iter()
                .map(|&(name, estimate, std_error, t_stat)| crate::analytics::Coefficient {
                    name: name.to_string(),
                    estimate,
                    std_error,
                    t_stat,
                })
                .collect(),
            r_squared: self.r_squared,
            adj_r_squared: self.adj_r_squared,
            f_statistic: self.f_statistic,
            observations: 0,
            df_residual: 0,
        }
    }
}

pub const GOLDEN_REGRESSIONS: [GoldenRegression; 4] = [
    GoldenRegression {
        terms: &[
            ("Intercept", -3.509, 0.295, -11.88),
            ("ln(sigma)", 0.761, 0.046, 16.65),
        ],
        r_squared: 0.737,
        adj_r_squared: 0.734,
        f_statistic: 277.2,
    },
    GoldenRegression {
        terms: &[
            ("Intercept", -3.435, 0.324, -10.60),
            ("ln(sigma)", 0.775, 0.052, 14.84),
            ("ln(T)", -0.023, 0.040, -0.57),
        ],
        r_squared: 0.738,
        adj_r_squared: 0.732,
        f_statistic: 137.8,
    },
    GoldenRegression {
        terms: &[
            ("Intercept", 0.1587, 0.0017, 95.18),
            ("y", 0.0067, 0.0023, 2.907),
            ("z", 0.0474, 0.0063, 7.537),
        ],
        r_squared: 0.0127,
        adj_r_squared: 0.0123,
        f_statistic: 32.55,
    },
    GoldenRegression {
        terms: &[
            ("Intercept", -6.174, 0.062, -100.1),
            ("ln(T)", 0.368, 0.068, 5.412),
        ],
        r_squared: 0.228,
        adj_r_squared: 0.221,
        f_statistic: 29.29,
    },
];
