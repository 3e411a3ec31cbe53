//! Tree-walking interpreter over whole-panel kernels.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::AlphaDef;
use crate::data::{derive_adv, IndustryLevel, MarketData, Panel};
use crate::expr::{BinaryOp, Expr, Function, Input, UnaryOp, ValidatedExpr};
use crate::ops::{self, BinaryKind, CompareKind, OpError, Operand, UnaryKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WarmupPolicy {
    /// Rows without enough history are NaN.
    #[default]
    Nan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    /// Resolve every `IndClass.<level>` to this level instead.
    pub industry_level_override: Option<IndustryLevel>,
    pub warmup_policy: WarmupPolicy,
    /// Window variance below which a correlation is undefined.
    pub variance_epsilon: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            industry_level_override: None,
            warmup_policy: WarmupPolicy::Nan,
            variance_epsilon: ops::VARIANCE_EPSILON,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub values: Panel,
    /// Leading rows that cannot be defined for lack of history.
    pub warmup_rows: usize,
    /// Share of NaN cells at or after row `warmup_rows`.
    pub nan_fraction_after_warmup: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("market data lacks required input `{0}`")]
    MissingInput(Input),
    #[error("market data has no industry classification at level `{0}`")]
    MissingIndustryLevel(IndustryLevel),
    #[error("insufficient history: expression needs more than {required} days, market has {available}")]
    InsufficientHistory { required: usize, available: usize },
    #[error("variance epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    Kernel(#[from] OpError),
    #[error("internal evaluation error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(f64),
    Panel(Arc<Panel>),
}

impl Value {
    fn operand(&self) -> Operand<'_> {
        match self {
            Value::Scalar(v) => Operand::Scalar(*v),
            Value::Panel(p) => Operand::Panel(p),
        }
    }
}

/// Evaluate a validated expression over `market`.
pub fn evaluate(
    expr: &ValidatedExpr,
    market: &MarketData,
    config: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    if !(config.variance_epsilon > 0.0) {
        return Err(EvalError::InvalidEpsilon(config.variance_epsilon));
    }
    for input in &expr.required_inputs {
        if *input == Input::Cap && market.cap().is_none() {
            return Err(EvalError::MissingInput(Input::Cap));
        }
    }
    for level in &expr.required_industry_levels {
        let level = config.industry_level_override.unwrap_or(*level);
        if !market.industry().has_level(level) {
            return Err(EvalError::MissingIndustryLevel(level));
        }
    }
    if market.days() <= expr.max_lookback {
        return Err(EvalError::InsufficientHistory {
            required: expr.max_lookback,
            available: market.days(),
        });
    }

    let mut evaluator = Evaluator {
        market,
        config,
        cache: HashMap::new(),
    };
    let values = match evaluator.eval(&expr.expr)? {
        Value::Panel(p) => Arc::try_unwrap(p).unwrap_or_else(|p| (*p).clone()),
        Value::Scalar(v) => Panel::filled(
            Arc::clone(market.calendar()),
            Arc::clone(market.universe()),
            v,
        ),
    };
    let warmup_rows = expr.max_lookback - 1;
    let tail = &values.values()[warmup_rows * values.cols()..];
    let nan_fraction_after_warmup = if tail.is_empty() {
        0.0
    } else {
        tail.iter().filter(|v| v.is_nan()).count() as f64 / tail.len() as f64
    };
    Ok(EvalReport {
        values,
        warmup_rows,
        nan_fraction_after_warmup,
    })
}

/// Evaluate each alpha independently (in parallel). Failures are recorded
/// per alpha.
pub fn evaluate_corpus(
    defs: &[AlphaDef],
    market: &MarketData,
    config: &EvalConfig,
) -> BTreeMap<u32, Result<EvalReport, EvalError>> {
    defs.par_iter()
        .map(|def| (def.id, evaluate(&def.expr, market, config)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

struct Evaluator<'a> {
    market: &'a MarketData,
    config: &'a EvalConfig,
    /// Per-call memo of subtrees keyed by their canonical text.
    cache: HashMap<String, Value>,
}

impl Evaluator<'_> {
    fn eval(&mut self, expr: &Expr) -> Result<Value, EvalError> {
        match expr {
            Expr::Number(v) => return Ok(Value::Scalar(*v)),
            Expr::Group(level) => {
                return Err(EvalError::Internal(format!(
                    "IndClass.{level} evaluated outside indneutralize"
                )))
            }
            _ => {}
        }
        let key = expr.to_string();
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let value = self.eval_uncached(expr)?;
        self.cache.insert(key, value.clone());
        Ok(value)
    }

    fn materialize(&self, value: &Value) -> Arc<Panel> {
        match value {
            Value::Panel(p) => Arc::clone(p),
            Value::Scalar(v) => Arc::new(Panel::filled(
                Arc::clone(self.market.calendar()),
                Arc::clone(self.market.universe()),
                *v,
            )),
        }
    }

    fn input(&self, input: Input) -> Result<Panel, EvalError> {
        let m = self.market;
        Ok(match input {
            Input::Returns => m.returns().clone(),
            Input::Open => m.open().clone(),
            Input::Close => m.close().clone(),
            Input::High => m.high().clone(),
            Input::Low => m.low().clone(),
            Input::Volume => m.volume().clone(),
            Input::Vwap => m.vwap().clone(),
            Input::Cap => m.cap().ok_or(EvalError::MissingInput(Input::Cap))?.clone(),
            Input::Adv(d) => derive_adv(m, d as usize),
        })
    }

    fn eval_uncached(&mut self, expr: &Expr) -> Result<Value, EvalError> {
        Ok(match expr {
            Expr::Number(_) | Expr::Group(_) => unreachable!("handled in eval"),
            Expr::Input(input) => Value::Panel(Arc::new(self.input(*input)?)),
            Expr::Unary {
                op: UnaryOp::Negate,
                operand,
            } => self.unary(UnaryKind::Negate, operand)?,
            Expr::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs)?;
                let r = self.eval(rhs)?;
                binary(*op, &l, &r)?
            }
            Expr::Ternary {
                cond,
                then,
                otherwise,
            } => {
                let c = self.eval(cond)?;
                let a = self.eval(then)?;
                let b = self.eval(otherwise)?;
                match (&c, &a, &b) {
                    (Value::Scalar(c), Value::Scalar(a), Value::Scalar(b)) => {
                        Value::Scalar(select(*c, *a, *b))
                    }
                    _ => Value::Panel(Arc::new(ops::ternary_select(
                        c.operand(),
                        a.operand(),
                        b.operand(),
                    )?)),
                }
            }
            Expr::Call { name, args } => {
                let function: Function = name
                    .parse()
                    .map_err(|e| EvalError::Internal(format!("{e}")))?;
                self.call(function, args)?
            }
        })
    }

    fn unary(&mut self, kind: UnaryKind, operand: &Expr) -> Result<Value, EvalError> {
        Ok(match self.eval(operand)? {
            Value::Scalar(v) => Value::Scalar(finite(kind.apply(v))),
            Value::Panel(p) => Value::Panel(Arc::new(ops::elementwise_unary(kind, &p))),
        })
    }

    fn window(args: &[Expr], index: usize) -> Result<usize, EvalError> {
        match args.get(index) {
            Some(Expr::Number(v)) if *v >= 0.0 => Ok(*v as usize),
            _ => Err(EvalError::Internal("window argument is not a literal".into())),
        }
    }

    fn panel_arg(&mut self, args: &[Expr], index: usize) -> Result<Arc<Panel>, EvalError> {
        let value = self.eval(&args[index])?;
        Ok(self.materialize(&value))
    }

    fn call(&mut self, function: Function, args: &[Expr]) -> Result<Value, EvalError> {
        let panel = |p: Panel| Ok(Value::Panel(Arc::new(p)));
        match function {
            Function::Abs => self.unary(UnaryKind::Abs, &args[0]),
            Function::Log => self.unary(UnaryKind::Log, &args[0]),
            Function::Sign => self.unary(UnaryKind::Sign, &args[0]),
            Function::Rank => panel(ops::cs_rank(self.panel_arg(args, 0)?.as_ref())),
            Function::Scale => {
                let a = match args.get(1) {
                    Some(Expr::Number(a)) => *a,
                    _ => 1.0,
                };
                panel(ops::cs_scale(self.panel_arg(args, 0)?.as_ref(), a))
            }
            Function::IndNeutralize => {
                let Some(Expr::Group(level)) = args.get(1) else {
                    return Err(EvalError::Internal("indneutralize without group".into()));
                };
                let level = self.config.industry_level_override.unwrap_or(*level);
                let groups = self
                    .market
                    .industry()
                    .group_vector(level)
                    .ok_or(EvalError::MissingIndustryLevel(level))?;
                panel(ops::cs_indneutralize(self.panel_arg(args, 0)?.as_ref(), &groups)?)
            }
            Function::Delay => panel(ops::ts_delay(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?)),
            Function::Delta => panel(ops::ts_delta(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?)),
            Function::Sum => panel(ops::ts_sum(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?)),
            Function::Product => {
                panel(ops::ts_product(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?))
            }
            Function::Stddev => {
                panel(ops::ts_stddev(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?))
            }
            Function::TsMin => panel(ops::ts_min(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?)),
            Function::TsMax => panel(ops::ts_max(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?)),
            Function::TsArgMax => {
                panel(ops::ts_argmax(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?))
            }
            Function::TsArgMin => {
                panel(ops::ts_argmin(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?))
            }
            Function::TsRank => panel(ops::ts_rank(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?)),
            Function::DecayLinear => {
                panel(ops::decay_linear(self.panel_arg(args, 0)?.as_ref(), Self::window(args, 1)?))
            }
            Function::Correlation => {
                let x = self.panel_arg(args, 0)?;
                let y = self.panel_arg(args, 1)?;
                let d = Self::window(args, 2)?;
                panel(ops::ts_correlation(&x, &y, d, self.config.variance_epsilon)?)
            }
            Function::Covariance => {
                let x = self.panel_arg(args, 0)?;
                let y = self.panel_arg(args, 1)?;
                panel(ops::ts_covariance(&x, &y, Self::window(args, 2)?)?)
            }
            Function::SignedPower => {
                let x = self.eval(&args[0])?;
                let a = self.eval(&args[1])?;
                match (&x, &a) {
                    (Value::Scalar(x), Value::Scalar(a)) => {
                        Ok(Value::Scalar(ops_scalar_signedpower(*x, *a)))
                    }
                    _ => panel(ops::signedpower(x.operand(), a.operand())?),
                }
            }
            Function::Min | Function::Max => {
                let kind = if function == Function::Min {
                    BinaryKind::Min
                } else {
                    BinaryKind::Max
                };
                let x = self.eval(&args[0])?;
                let y = self.eval(&args[1])?;
                arithmetic(kind, &x, &y)
            }
        }
    }
}

fn finite(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::NAN
    }
}

fn select(c: f64, a: f64, b: f64) -> f64 {
    if c.is_nan() {
        f64::NAN
    } else if c != 0.0 {
        a
    } else {
        b
    }
}

fn ops_scalar_signedpower(x: f64, a: f64) -> f64 {
    if x.is_nan() || a.is_nan() {
        return f64::NAN;
    }
    let sign = if x == 0.0 { 0.0 } else { x.signum() };
    finite(sign * x.abs().powf(a))
}

fn arithmetic(kind: BinaryKind, l: &Value, r: &Value) -> Result<Value, EvalError> {
    Ok(match (l, r) {
        (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(kind.apply(*a, *b)),
        _ => Value::Panel(Arc::new(ops::elementwise_binary(kind, l.operand(), r.operand())?)),
    })
}

fn comparison(kind: CompareKind, l: &Value, r: &Value) -> Result<Value, EvalError> {
    Ok(match (l, r) {
        (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(kind.apply(*a, *b)),
        _ => Value::Panel(Arc::new(ops::compare(kind, l.operand(), r.operand())?)),
    })
}

fn binary(op: BinaryOp, l: &Value, r: &Value) -> Result<Value, EvalError> {
    match op {
        BinaryOp::Add => arithmetic(BinaryKind::Add, l, r),
        BinaryOp::Sub => arithmetic(BinaryKind::Sub, l, r),
        BinaryOp::Mul => arithmetic(BinaryKind::Mul, l, r),
        BinaryOp::Div => arithmetic(BinaryKind::Div, l, r),
        BinaryOp::Pow => arithmetic(BinaryKind::Pow, l, r),
        BinaryOp::Lt => comparison(CompareKind::Lt, l, r),
        BinaryOp::Gt => comparison(CompareKind::Gt, l, r),
        BinaryOp::Le => comparison(CompareKind::Le, l, r),
        BinaryOp::Ge => comparison(CompareKind::Ge, l, r),
        BinaryOp::Eq => comparison(CompareKind::Eq, l, r),
        BinaryOp::Or => Ok(match (l, r) {
            (Value::Scalar(a), Value::Scalar(b)) => {
                let truthy = |v: f64| !v.is_nan() && v != 0.0;
                Value::Scalar(if truthy(*a) || truthy(*b) {
                    1.0
                } else if a.is_nan() || b.is_nan() {
                    f64::NAN
                } else {
                    0.0
                })
            }
            _ => Value::Panel(Arc::new(ops::logical_or(l.operand(), r.operand())?)),
        }),
    }
}
