//! Formulaic alpha engine: a panel data model, an expression language for
//! alpha formulas, vectorized kernels, a tree-walking evaluator, the
//! embedded 101-alpha corpus, a dollar-neutral backtester and the
//! regression analytics used to study alpha returns, volatility, turnover
//! and pairwise correlations.

pub mod analytics;
pub mod backtest;
pub mod corpus;
pub mod data;
pub mod eval;
pub mod expr;
pub mod ops;
pub mod report;

#[cfg(test)]
mod test_support;

pub use corpus::{load_corpus, AlphaDef, DelayClass};
pub use data::{IndustryLevel, MarketData, Panel};
pub use eval::{evaluate, evaluate_corpus, EvalConfig, EvalError, EvalReport};
pub use expr::{compile, parse, validate, Expr, ValidatedExpr};
