//! Panel kernels for every function and operator of the alpha language.
//!
//! All kernels are pure. Outputs share the calendar and universe of their
//! inputs and never contain `±∞` (such results are stored as NaN).
//! Time-series kernels follow the full-window rule: the output at `t` is NaN
//! unless all `d` cells `t-d+1..=t` of the window are present, which also
//! makes the first `d-1` rows NaN.

mod cross_section;
mod elementwise;
mod time_series;

use rayon::prelude::*;
use thiserror::Error;

use crate::data::Panel;

pub use cross_section::{cs_indneutralize, cs_rank, cs_scale};
pub use elementwise::{
    compare, elementwise_binary, elementwise_unary, logical_or, signedpower, ternary_select,
    BinaryKind, CompareKind, UnaryKind,
};
pub use time_series::{
    decay_linear, ts_argmax, ts_argmin, ts_correlation, ts_covariance, ts_delay, ts_delta, ts_max,
    ts_mean, ts_min, ts_product, ts_rank, ts_stddev, ts_sum,
};

/// Default variance floor below which a correlation window is degenerate.
pub const VARIANCE_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpError {
    #[error("operand shapes differ: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("at least one operand must be a panel")]
    NoPanel,
    #[error("group vector covers {groups} assets but panel has {cols}")]
    GroupCoverage { groups: usize, cols: usize },
}

/// A kernel argument: a full panel or a scalar broadcast to every cell.
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Panel(&'a Panel),
    Scalar(f64),
}

impl<'a> From<&'a Panel> for Operand<'a> {
    fn from(p: &'a Panel) -> Self {
        Operand::Panel(p)
    }
}

impl From<f64> for Operand<'_> {
    fn from(v: f64) -> Self {
        Operand::Scalar(v)
    }
}

impl Operand<'_> {
    #[inline]
    fn at(&self, k: usize) -> f64 {
        match self {
            Operand::Panel(p) => p.values()[k],
            Operand::Scalar(v) => *v,
        }
    }
}

/// Picks the shape template among operands, checking that all panels agree.
fn template<'a>(operands: &[Operand<'a>]) -> Result<&'a Panel, OpError> {
    let mut found: Option<&'a Panel> = None;
    for op in operands {
        if let Operand::Panel(p) = *op {
            match found {
                None => found = Some(p),
                Some(first) => check_shape(first, p)?,
            }
        }
    }
    found.ok_or(OpError::NoPanel)
}

pub(crate) fn check_shape(a: &Panel, b: &Panel) -> Result<(), OpError> {
    if a.rows() != b.rows() || a.cols() != b.cols() || !a.same_axes(b) {
        return Err(OpError::ShapeMismatch {
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    Ok(())
}

/// Asset → group assignment used by `indneutralize`. Groups are dense
/// indices `0..group_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupVector {
    groups: Vec<usize>,
    count: usize,
}

impl GroupVector {
    pub fn new(groups: Vec<usize>) -> Self {
        let count = groups.iter().max().map_or(0, |m| m + 1);
        Self { groups, count }
    }

    /// Dense indices for string labels, numbered by first appearance.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Self {
        let mut seen: Vec<&str> = Vec::new();
        let groups = labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                match seen.iter().position(|s| *s == l) {
                    Some(g) => g,
                    None => {
                        seen.push(l);
                        seen.len() - 1
                    }
                }
            })
            .collect();
        Self::new(groups)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group_of(&self, column: usize) -> usize {
        self.groups[column]
    }

    pub fn group_count(&self) -> usize {
        self.count
    }
}

/// Runs `f(column_in, column_out)` for every asset column in parallel and
/// reassembles a row-major panel. Each column is computed independently, so
/// results do not depend on scheduling.
pub(crate) fn per_column<F>(x: &Panel, f: F) -> Panel
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let (rows, cols) = (x.rows(), x.cols());
    let columns: Vec<Vec<f64>> = (0..cols)
        .into_par_iter()
        .map(|i| {
            let input = x.column(i);
            let mut out = vec![f64::NAN; rows];
            f(&input, &mut out);
            out
        })
        .collect();
    x.with_values(transpose(&columns, rows, cols))
}

/// Two-input variant of [`per_column`]; shapes must already match.
pub(crate) fn per_column2<F>(x: &Panel, y: &Panel, f: F) -> Panel
where
    F: Fn(&[f64], &[f64], &mut [f64]) + Sync,
{
    let (rows, cols) = (x.rows(), x.cols());
    let columns: Vec<Vec<f64>> = (0..cols)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (x.column(i), y.column(i));
            let mut out = vec![f64::NAN; rows];
            f(&a, &b, &mut out);
            out
        })
        .collect();
    x.with_values(transpose(&columns, rows, cols))
}

fn transpose(columns: &[Vec<f64>], rows: usize, cols: usize) -> Vec<f64> {
    let mut values = vec![f64::NAN; rows * cols];
    for (i, column) in columns.iter().enumerate() {
        for (t, v) in column.iter().enumerate() {
            values[t * cols + i] = *v;
        }
    }
    values
}
