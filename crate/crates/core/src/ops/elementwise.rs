use super::{template, OpError, Operand};
use crate::data::Panel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryKind {
    Abs,
    Log,
    Sign,
    Negate,
}

impl UnaryKind {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            UnaryKind::Abs => x.abs(),
            UnaryKind::Log => {
                if x > 0.0 {
                    x.ln()
                } else {
                    f64::NAN
                }
            }
            // f64::signum maps ±0 to ±1
            UnaryKind::Sign => {
                if x == 0.0 {
                    0.0
                } else {
                    x.signum()
                }
            }
            UnaryKind::Negate => -x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryKind {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Min,
    Max,
}

impl BinaryKind {
    #[inline]
    pub fn apply(self, x: f64, y: f64) -> f64 {
        if x.is_nan() || y.is_nan() {
            return f64::NAN;
        }
        let v = match self {
            BinaryKind::Add => x + y,
            BinaryKind::Sub => x - y,
            BinaryKind::Mul => x * y,
            BinaryKind::Div => x / y,
            BinaryKind::Pow => x.powf(y),
            BinaryKind::Min => x.min(y),
            BinaryKind::Max => x.max(y),
        };
        finite_or_nan(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareKind {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
}

impl CompareKind {
    #[inline]
    pub fn apply(self, x: f64, y: f64) -> f64 {
        if x.is_nan() || y.is_nan() {
            return f64::NAN;
        }
        let truth = match self {
            CompareKind::Lt => x < y,
            CompareKind::Gt => x > y,
            CompareKind::Le => x <= y,
            CompareKind::Ge => x >= y,
            CompareKind::Eq => x == y,
        };
        bool_value(truth)
    }
}

#[inline]
fn bool_value(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn finite_or_nan(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::NAN
    }
}

/// `x || y` on numeric booleans: a nonzero present operand decides the result.
#[inline]
pub(crate) fn or_scalar(x: f64, y: f64) -> f64 {
    let truthy = |v: f64| !v.is_nan() && v != 0.0;
    if truthy(x) || truthy(y) {
        1.0
    } else if x.is_nan() || y.is_nan() {
        f64::NAN
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn select_scalar(cond: f64, a: f64, b: f64) -> f64 {
    if cond.is_nan() {
        f64::NAN
    } else if cond != 0.0 {
        a
    } else {
        b
    }
}

#[inline]
pub(crate) fn signedpower_scalar(x: f64, a: f64) -> f64 {
    if x.is_nan() || a.is_nan() {
        return f64::NAN;
    }
    let sign = if x == 0.0 { 0.0 } else { x.signum() };
    finite_or_nan(sign * x.abs().powf(a))
}

pub fn elementwise_unary(kind: UnaryKind, x: &Panel) -> Panel {
    x.with_values(x.values().iter().map(|&v| kind.apply(v)).collect())
}

fn zip2(x: Operand<'_>, y: Operand<'_>, f: impl Fn(f64, f64) -> f64) -> Result<Panel, OpError> {
    let shape = template(&[x, y])?;
    let values = (0..shape.values().len()).map(|k| f(x.at(k), y.at(k))).collect();
    Ok(shape.with_values(values))
}

/// `+ - * / ^ min max` with scalar broadcasting.
pub fn elementwise_binary(kind: BinaryKind, x: Operand<'_>, y: Operand<'_>) -> Result<Panel, OpError> {
    zip2(x, y, |a, b| kind.apply(a, b))
}

/// Comparison producing 1.0 / 0.0, or NaN when either side is missing.
pub fn compare(kind: CompareKind, x: Operand<'_>, y: Operand<'_>) -> Result<Panel, OpError> {
    zip2(x, y, |a, b| kind.apply(a, b))
}

/// `x || y`: 1 if either side is nonzero, 0 if both are zero, NaN when the
/// answer hinges on a missing operand.
pub fn logical_or(x: Operand<'_>, y: Operand<'_>) -> Result<Panel, OpError> {
    zip2(x, y, or_scalar)
}

/// `cond ? a : b` cell by cell; a missing condition gives NaN.
pub fn ternary_select(cond: Operand<'_>, a: Operand<'_>, b: Operand<'_>) -> Result<Panel, OpError> {
    let shape = template(&[cond, a, b])?;
    let values = (0..shape.values().len())
        .map(|k| select_scalar(cond.at(k), a.at(k), b.at(k)))
        .collect();
    Ok(shape.with_values(values))
}

/// Sign-preserving power `sign(x)·|x|^a`; the exponent may itself be a panel.
pub fn signedpower(x: Operand<'_>, a: Operand<'_>) -> Result<Panel, OpError> {
    zip2(x, a, signedpower_scalar)
}
