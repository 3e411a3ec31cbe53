use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{Expr, Input};
use crate::data::IndustryLevel;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ValidationError {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{function}` takes {expected} argument(s), got {actual}")]
    Arity {
        function: String,
        expected: String,
        actual: usize,
    },
    #[error("`{function}` argument {index} must be a positive number literal")]
    WindowNotLiteral { function: String, index: usize },
    #[error("`{function}` window {value} becomes {floored} after flooring; minimum is {minimum}")]
    WindowTooSmall {
        function: String,
        value: f64,
        floored: i64,
        minimum: usize,
    },
    #[error("`{function}` argument {index} must be a positive number literal")]
    ScalarNotLiteral { function: String, index: usize },
    #[error("`{function}` argument {index} must be an industry classification (IndClass.<level>)")]
    ExpectedGroup { function: String, index: usize },
    #[error("{0} is only valid as the second argument of indneutralize")]
    MisplacedGroup(String),
    #[error("`adv0` is not a valid input: the adv window must be at least one day")]
    ZeroAdv,
}

/// Built-in functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    Abs,
    Log,
    Sign,
    Rank,
    Scale,
    IndNeutralize,
    Delay,
    Delta,
    Correlation,
    Covariance,
    SignedPower,
    DecayLinear,
    TsMin,
    TsMax,
    TsArgMax,
    TsArgMin,
    TsRank,
    Sum,
    Product,
    Stddev,
    /// Elementwise minimum of two expressions.
    Min,
    /// Elementwise maximum of two expressions.
    Max,
}

#[derive(Clone, Copy)]
enum Arg {
    Expr,
    /// Day count; literal floored and checked against the minimum.
    Window(usize),
    /// Optional positive literal constant.
    OptionalScalar,
    Group,
}

impl Function {
    pub const ALL: [Function; 22] = [
        Function::Abs,
        Function::Log,
        Function::Sign,
        Function::Rank,
        Function::Scale,
        Function::IndNeutralize,
        Function::Delay,
        Function::Delta,
        Function::Correlation,
        Function::Covariance,
        Function::SignedPower,
        Function::DecayLinear,
        Function::TsMin,
        Function::TsMax,
        Function::TsArgMax,
        Function::TsArgMin,
        Function::TsRank,
        Function::Sum,
        Function::Product,
        Function::Stddev,
        Function::Min,
        Function::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Abs => "abs",
            Function::Log => "log",
            Function::Sign => "sign",
            Function::Rank => "rank",
            Function::Scale => "scale",
            Function::IndNeutralize => "indneutralize",
            Function::Delay => "delay",
            Function::Delta => "delta",
            Function::Correlation => "correlation",
            Function::Covariance => "covariance",
            Function::SignedPower => "signedpower",
            Function::DecayLinear => "decay_linear",
            Function::TsMin => "ts_min",
            Function::TsMax => "ts_max",
            Function::TsArgMax => "ts_argmax",
            Function::TsArgMin => "ts_argmin",
            Function::TsRank => "ts_rank",
            Function::Sum => "sum",
            Function::Product => "product",
            Function::Stddev => "stddev",
            Function::Min => "min",
            Function::Max => "max",
        }
    }

    fn signature(self) -> &'static [Arg] {
        use Arg::*;
        match self {
            Function::Abs | Function::Log | Function::Sign | Function::Rank => &[Expr],
            Function::Scale => &[Expr, OptionalScalar],
            Function::IndNeutralize => &[Expr, Group],
            Function::Delay
            | Function::Delta
            | Function::DecayLinear
            | Function::TsMin
            | Function::TsMax
            | Function::TsArgMax
            | Function::TsArgMin
            | Function::Sum
            | Function::Product => &[Expr, Window(1)],
            Function::TsRank | Function::Stddev => &[Expr, Window(2)],
            Function::Correlation | Function::Covariance => &[Expr, Expr, Window(2)],
            Function::SignedPower | Function::Min | Function::Max => &[Expr, Expr],
        }
    }

    /// Extra history a windowed function needs beyond its inputs' own.
    fn extra_lookback(self, window: usize) -> usize {
        match self {
            Function::Delay | Function::Delta => window,
            Function::DecayLinear
            | Function::TsMin
            | Function::TsMax
            | Function::TsArgMax
            | Function::TsArgMin
            | Function::TsRank
            | Function::Sum
            | Function::Product
            | Function::Stddev
            | Function::Correlation
            | Function::Covariance => window - 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Function {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Function::ALL
            .iter()
            .copied()
            .find(|f| f.name() == lower)
            .ok_or(ValidationError::UnknownFunction(lower))
    }
}

/// A checked expression with its data requirements.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedExpr {
    /// Normalized tree: window literals floored, `min(x, d)`/`max(x, d)`
    /// rewritten to `ts_min`/`ts_max`.
    pub expr: Expr,
    pub required_inputs: BTreeSet<Input>,
    pub required_industry_levels: BTreeSet<IndustryLevel>,
    /// Days of history needed before the first defined output, counting
    /// today; the first `max_lookback - 1` rows are warmup.
    pub max_lookback: usize,
}

/// Check arities and argument kinds against the built-in function table,
/// floor window literals, and compute data requirements.
pub fn validate(expr: &Expr) -> Result<ValidatedExpr, ValidationError> {
    let mut inputs = BTreeSet::new();
    let mut levels = BTreeSet::new();
    let (normalized, lookback) = walk(expr, &mut inputs, &mut levels)?;
    Ok(ValidatedExpr {
        expr: normalized,
        required_inputs: inputs,
        required_industry_levels: levels,
        max_lookback: lookback,
    })
}

fn walk(
    expr: &Expr,
    inputs: &mut BTreeSet<Input>,
    levels: &mut BTreeSet<IndustryLevel>,
) -> Result<(Expr, usize), ValidationError> {
    match expr {
        Expr::Number(v) => Ok((Expr::Number(*v), 1)),
        Expr::Input(input) => {
            if *input == Input::Adv(0) {
                return Err(ValidationError::ZeroAdv);
            }
            inputs.insert(*input);
            Ok((Expr::Input(*input), input.lookback()))
        }
        Expr::Group(level) => Err(ValidationError::MisplacedGroup(format!("IndClass.{level}"))),
        Expr::Unary { op, operand } => {
            let (inner, lb) = walk(operand, inputs, levels)?;
            Ok((
                Expr::Unary {
                    op: *op,
                    operand: Box::new(inner),
                },
                lb,
            ))
        }
        Expr::Binary { op, lhs, rhs } => {
            let (l, la) = walk(lhs, inputs, levels)?;
            let (r, lb) = walk(rhs, inputs, levels)?;
            Ok((Expr::binary(*op, l, r), la.max(lb)))
        }
        Expr::Ternary {
            cond,
            then,
            otherwise,
        } => {
            let (c, lc) = walk(cond, inputs, levels)?;
            let (t, lt) = walk(then, inputs, levels)?;
            let (o, lo) = walk(otherwise, inputs, levels)?;
            Ok((Expr::ternary(c, t, o), lc.max(lt).max(lo)))
        }
        Expr::Call { name, args } => walk_call(name, args, inputs, levels),
    }
}

fn walk_call(
    name: &str,
    args: &[Expr],
    inputs: &mut BTreeSet<Input>,
    levels: &mut BTreeSet<IndustryLevel>,
) -> Result<(Expr, usize), ValidationError> {
    let mut function: Function = name.parse()?;
    // min(x, d) / max(x, d) with a literal second argument are the
    // time-series aliases; otherwise they are elementwise.
    if matches!(function, Function::Min | Function::Max)
        && args.len() == 2
        && matches!(args[1], Expr::Number(_))
    {
        function = if function == Function::Min {
            Function::TsMin
        } else {
            Function::TsMax
        };
    }
    let signature = function.signature();
    let required = signature
        .iter()
        .filter(|a| !matches!(a, Arg::OptionalScalar))
        .count();
    if args.len() < required || args.len() > signature.len() {
        let expected = if required == signature.len() {
            required.to_string()
        } else {
            format!("{required} or {}", signature.len())
        };
        return Err(ValidationError::Arity {
            function: function.name().into(),
            expected,
            actual: args.len(),
        });
    }

    let mut out_args = Vec::with_capacity(args.len());
    let mut child_lookback = 0usize;
    let mut window = None;
    for (index, (arg, kind)) in args.iter().zip(signature).enumerate() {
        match kind {
            Arg::Expr => {
                let (e, lb) = walk(arg, inputs, levels)?;
                child_lookback = child_lookback.max(lb);
                out_args.push(e);
            }
            Arg::Window(minimum) => {
                let Expr::Number(value) = *arg else {
                    return Err(ValidationError::WindowNotLiteral {
                        function: function.name().into(),
                        index: index + 1,
                    });
                };
                let floored = value.floor();
                if floored < *minimum as f64 {
                    return Err(ValidationError::WindowTooSmall {
                        function: function.name().into(),
                        value,
                        floored: floored as i64,
                        minimum: *minimum,
                    });
                }
                window = Some(floored as usize);
                out_args.push(Expr::Number(floored));
            }
            Arg::OptionalScalar => match *arg {
                Expr::Number(v) if v > 0.0 => out_args.push(Expr::Number(v)),
                _ => {
                    return Err(ValidationError::ScalarNotLiteral {
                        function: function.name().into(),
                        index: index + 1,
                    })
                }
            },
            Arg::Group => match *arg {
                Expr::Group(level) => {
                    levels.insert(level);
                    out_args.push(Expr::Group(level));
                }
                _ => {
                    return Err(ValidationError::ExpectedGroup {
                        function: function.name().into(),
                        index: index + 1,
                    })
                }
            },
        }
    }
    let lookback = child_lookback + window.map_or(0, |w| function.extra_lookback(w));
    Ok((Expr::call(function.name(), out_args), lookback))
}
