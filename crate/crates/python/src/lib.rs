//! Python bindings. Panels cross the boundary as nested lists (rows of
//! dates, columns of assets) with `nan` for missing values.

use std::collections::BTreeMap;

use alphaforge_core::analytics::{ols_fit, summarize_quantiles, RegressionResult};
use alphaforge_core::backtest::{alpha_to_weights, compute_stats, simulate, AlphaStats};
use alphaforge_core::corpus::{self, DelayClass};
use alphaforge_core::data::{generate_synthetic, load_market_csv, IngestOptions};
use alphaforge_core::eval::{evaluate, EvalConfig};
use alphaforge_core::{compile, ops, MarketData, Panel as CorePanel};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A dates x assets matrix of floats.
#[pyclass(name = "Panel", module = "alphaforge", frozen)]
struct PyPanel {
    inner: CorePanel,
}

#[pymethods]
impl PyPanel {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let t = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("rows have different lengths"));
        }
        let values = rows.into_iter().flatten().collect();
        Ok(Self {
            inner: CorePanel::from_values(t, n, values).map_err(value_error)?,
        })
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows(), self.inner.cols())
    }

    fn get(&self, t: usize, i: usize) -> PyResult<f64> {
        if t >= self.inner.rows() || i >= self.inner.cols() {
            return Err(pyo3::exceptions::PyIndexError::new_err("index out of range"));
        }
        Ok(self.inner.get(t, i))
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        (0..self.inner.rows())
            .map(|t| self.inner.row(t).to_vec())
            .collect()
    }

    fn nan_count(&self) -> usize {
        self.inner.nan_count()
    }

    fn __repr__(&self) -> String {
        format!("Panel({} x {})", self.inner.rows(), self.inner.cols())
    }
}

/// Market data: prices, volume, optional cap and industry labels.
#[pyclass(name = "Market", module = "alphaforge", frozen)]
struct PyMarket {
    inner: MarketData,
}

#[pymethods]
impl PyMarket {
    /// Seeded synthetic market with cap and three industry levels.
    #[staticmethod]
    #[pyo3(signature = (seed, days, assets, groups = 10))]
    fn synthetic(seed: u64, days: usize, assets: usize, groups: usize) -> PyResult<Self> {
        Ok(Self {
            inner: generate_synthetic(seed, days, assets, groups).map_err(value_error)?,
        })
    }

    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: load_market_csv(path, &IngestOptions::default()).map_err(value_error)?,
        })
    }

    #[getter]
    fn days(&self) -> usize {
        self.inner.days()
    }

    #[getter]
    fn assets(&self) -> Vec<String> {
        self.inner.universe().assets().to_vec()
    }

    #[getter]
    fn dates(&self) -> Vec<String> {
        self.inner
            .calendar()
            .dates()
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn close(&self) -> PyPanel {
        PyPanel {
            inner: self.inner.close().clone(),
        }
    }

    fn truncate(&self, days: usize) -> Self {
        Self {
            inner: self.inner.truncate(days),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Market({} days x {} assets)",
            self.inner.days(),
            self.inner.universe().len()
        )
    }
}

/// Canonical fully parenthesized form of an expression.
#[pyfunction]
fn parse(source: &str) -> PyResult<String> {
    alphaforge_core::parse(source)
        .map(|e| e.to_string())
        .map_err(value_error)
}

/// Validate an expression and report its data requirements.
#[pyfunction]
fn validate<'py>(py: Python<'py>, source: &str) -> PyResult<Bound<'py, PyDict>> {
    let v = compile(source).map_err(value_error)?;
    let d = PyDict::new(py);
    d.set_item("canonical", v.expr.to_string())?;
    d.set_item(
        "inputs",
        v.required_inputs.iter().map(ToString::to_string).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "industry_levels",
        v.required_industry_levels
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>(),
    )?;
    d.set_item("max_lookback", v.max_lookback)?;
    Ok(d)
}

/// The 101 corpus alphas as dictionaries.
#[pyfunction]
fn corpus_alphas(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    corpus::load_corpus()
        .into_iter()
        .map(|def| {
            let d = PyDict::new(py);
            d.set_item("id", def.id)?;
            d.set_item("source", def.source)?;
            d.set_item("delay", def.delay_class.days())?;
            d.set_item("max_lookback", def.expr.max_lookback)?;
            d.set_item("notes", def.notes)?;
            Ok(d)
        })
        .collect()
}

/// Result of evaluating one expression.
#[pyclass(name = "Evaluation", module = "alphaforge", frozen, get_all)]
struct PyEvaluation {
    values: Py<PyPanel>,
    warmup_rows: usize,
    nan_fraction_after_warmup: f64,
}

fn source_for(expr: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(id) = expr.extract::<u32>() {
        return corpus::load_corpus()
            .into_iter()
            .find(|d| d.id == id)
            .map(|d| d.source)
            .ok_or_else(|| PyValueError::new_err(format!("no corpus alpha {id}")));
    }
    expr.extract::<String>()
}

/// Evaluate an expression string, or a corpus alpha id, over `market`.
#[pyfunction]
fn evaluate_alpha(
    py: Python<'_>,
    market: &PyMarket,
    expr: &Bound<'_, PyAny>,
) -> PyResult<PyEvaluation> {
    let source = source_for(expr)?;
    let validated = compile(&source).map_err(value_error)?;
    let report = py
        .detach(|| evaluate(&validated, &market.inner, &EvalConfig::default()))
        .map_err(value_error)?;
    Ok(PyEvaluation {
        values: Py::new(
            py,
            PyPanel {
                inner: report.values,
            },
        )?,
        warmup_rows: report.warmup_rows,
        nan_fraction_after_warmup: report.nan_fraction_after_warmup,
    })
}

fn stats_dict<'py>(py: Python<'py>, s: &AlphaStats) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("sharpe", s.sharpe)?;
    d.set_item("turnover", s.turnover)?;
    d.set_item("holding_period", s.holding_period)?;
    d.set_item("cents_per_share", s.cents_per_share)?;
    d.set_item("daily_vol", s.daily_vol)?;
    d.set_item("ann_return", s.ann_return)?;
    d.set_item("days", s.days)?;
    Ok(d)
}

/// Backtest alpha values as a dollar-neutral book and return its statistics.
#[pyfunction]
#[pyo3(signature = (market, values, book_size = 1e6, delay = 1))]
fn backtest<'py>(
    py: Python<'py>,
    market: &PyMarket,
    values: &PyPanel,
    book_size: f64,
    delay: u8,
) -> PyResult<Bound<'py, PyDict>> {
    let delay = match delay {
        0 => DelayClass::Zero,
        1 => DelayClass::One,
        other => return Err(PyValueError::new_err(format!("delay must be 0 or 1, got {other}"))),
    };
    if !values.inner.same_axes(market.inner.close()) {
        return Err(PyValueError::new_err(
            "values are not on the market's calendar and universe",
        ));
    }
    let weights = alpha_to_weights(&values.inner);
    let sim = simulate(&weights, &market.inner, delay, book_size).map_err(value_error)?;
    let stats = compute_stats(&sim).map_err(value_error)?;
    let d = stats_dict(py, &stats)?;
    d.set_item("daily_pnl", sim.daily_pnl)?;
    Ok(d)
}

/// Cross-sectional rank of each row, scaled to [0, 1].
#[pyfunction]
fn rank(x: &PyPanel) -> PyPanel {
    PyPanel {
        inner: ops::cs_rank(&x.inner),
    }
}

#[pyfunction]
fn ts_rank(x: &PyPanel, d: usize) -> PyPanel {
    PyPanel {
        inner: ops::ts_rank(&x.inner, d),
    }
}

#[pyfunction]
fn decay_linear(x: &PyPanel, d: usize) -> PyPanel {
    PyPanel {
        inner: ops::decay_linear(&x.inner, d),
    }
}

#[pyfunction]
fn correlation(x: &PyPanel, y: &PyPanel, d: usize) -> PyResult<PyPanel> {
    Ok(PyPanel {
        inner: ops::ts_correlation(&x.inner, &y.inner, d, ops::VARIANCE_EPSILON)
            .map_err(value_error)?,
    })
}

fn regression_dict<'py>(py: Python<'py>, r: &RegressionResult) -> PyResult<Bound<'py, PyDict>> {
    let coefficients = PyDict::new(py);
    for c in &r.coefficients {
        let row = PyDict::new(py);
        row.set_item("estimate", c.estimate)?;
        row.set_item("std_error", c.std_error)?;
        row.set_item("t_stat", c.t_stat)?;
        coefficients.set_item(&c.name, row)?;
    }
    let d = PyDict::new(py);
    d.set_item("coefficients", coefficients)?;
    d.set_item("r_squared", r.r_squared)?;
    d.set_item("adj_r_squared", r.adj_r_squared)?;
    d.set_item("f_statistic", r.f_statistic)?;
    d.set_item("observations", r.observations)?;
    Ok(d)
}

/// Least squares of `y` on named regressor columns.
#[pyfunction]
#[pyo3(signature = (y, regressors, intercept = true))]
fn ols<'py>(
    py: Python<'py>,
    y: Vec<f64>,
    regressors: BTreeMap<String, Vec<f64>>,
    intercept: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let columns: Vec<(&str, &[f64])> = regressors
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_slice()))
        .collect();
    let fit = ols_fit(&y, &columns, intercept).map_err(value_error)?;
    regression_dict(py, &fit)
}

/// (min, q1, median, mean, q3, max) with linearly interpolated quartiles.
#[pyfunction]
fn quantiles(values: Vec<f64>) -> PyResult<(f64, f64, f64, f64, f64, f64)> {
    let q = summarize_quantiles(&values).map_err(value_error)?;
    Ok((q.min, q.q1, q.median, q.mean, q.q3, q.max))
}

#[pymodule]
fn alphaforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPanel>()?;
    m.add_class::<PyMarket>()?;
    m.add_class::<PyEvaluation>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_alphas, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(backtest, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(ts_rank, m)?)?;
    m.add_function(wrap_pyfunction!(decay_linear, m)?)?;
    m.add_function(wrap_pyfunction!(correlation, m)?)?;
    m.add_function(wrap_pyfunction!(ols, m)?)?;
    m.add_function(wrap_pyfunction!(quantiles, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("RuntimeError", m.py().get_type::<PyRuntimeError>())?;
    Ok(())
}
