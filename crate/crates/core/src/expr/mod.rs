//! The alpha expression language: tokens, syntax tree, parser and validator.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := or ( '?' expr ':' expr )?          right-associative
//! or      := cmp ( '||' cmp )*
//! cmp     := add ( ('<' | '>' | '<=' | '>=' | '==') add )?   non-associative
//! add     := mul ( ('+' | '-') mul )*
//! mul     := unary ( ('*' | '/') unary )*
//! unary   := '-' unary | power
//! power   := primary ( '^' unary )?            right-associative
//! primary := number | input | IndClass.level | name '(' args ')' | '(' expr ')'
//! ```
//!
//! Identifiers are case-insensitive and canonicalized to lowercase.

mod lexer;
mod parser;
mod validate;

use std::fmt;
use std::str::FromStr;

use crate::data::IndustryLevel;

pub use lexer::{tokenize, LexError, Operator, Position, Punct, Token, TokenKind};
pub use parser::{parse, ParseError};
pub use validate::{validate, Function, ValidatedExpr, ValidationError};

/// Failure to turn source text into a [`ValidatedExpr`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("validation error: {0}")]
    Validate(#[from] ValidationError),
}

/// Parse and validate in one step.
pub fn compile(source: &str) -> Result<ValidatedExpr, CompileError> {
    Ok(validate(&parse(source)?)?)
}

/// A market data series referenced by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Input {
    Returns,
    Open,
    Close,
    High,
    Low,
    Volume,
    Vwap,
    Cap,
    /// `adv{d}`: trailing `d`-day average dollar volume.
    Adv(u32),
}

impl Input {
    /// Days of raw history needed to produce one value of this series.
    pub fn lookback(self) -> usize {
        match self {
            Input::Returns => 2,
            Input::Adv(d) => d as usize,
            _ => 1,
        }
    }
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Input::Returns => f.write_str("returns"),
            Input::Open => f.write_str("open"),
            Input::Close => f.write_str("close"),
            Input::High => f.write_str("high"),
            Input::Low => f.write_str("low"),
            Input::Volume => f.write_str("volume"),
            Input::Vwap => f.write_str("vwap"),
            Input::Cap => f.write_str("cap"),
            Input::Adv(d) => write!(f, "adv{d}"),
        }
    }
}

impl FromStr for Input {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.to_ascii_lowercase();
        Ok(match s.as_str() {
            "returns" => Input::Returns,
            "open" => Input::Open,
            "close" => Input::Close,
            "high" => Input::High,
            "low" => Input::Low,
            "volume" => Input::Volume,
            "vwap" => Input::Vwap,
            "cap" => Input::Cap,
            other => {
                let digits = other.strip_prefix("adv").ok_or(())?;
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(());
                }
                Input::Adv(digits.parse().map_err(|_| ())?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Negate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Or => "||",
        }
    }
}

/// Syntax tree of one alpha formula.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Input(Input),
    /// `IndClass.<level>`; only meaningful as the group argument of `indneutralize`.
    Group(IndustryLevel),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    /// Function call; `name` is lowercase.
    Call {
        name: String,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn number(v: f64) -> Self {
        Expr::Number(v)
    }

    pub fn negate(operand: Expr) -> Self {
        Expr::Unary {
            op: UnaryOp::Negate,
            operand: Box::new(operand),
        }
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn ternary(cond: Expr, then: Expr, otherwise: Expr) -> Self {
        Expr::Ternary {
            cond: Box::new(cond),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        }
    }

    pub fn call(name: impl Into<String>, args: Vec<Expr>) -> Self {
        Expr::Call {
            name: name.into().to_ascii_lowercase(),
            args,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Expr::Number(_) | Expr::Input(_) | Expr::Group(_) => 0,
            Expr::Unary { operand, .. } => operand.size(),
            Expr::Binary { lhs, rhs, .. } => lhs.size() + rhs.size(),
            Expr::Ternary {
                cond,
                then,
                otherwise,
            } => cond.size() + then.size() + otherwise.size(),
            Expr::Call { args, .. } => args.iter().map(Expr::size).sum(),
        }
    }
}

/// Fully parenthesized canonical form; re-parses to an identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Input(input) => write!(f, "{input}"),
            Expr::Group(level) => write!(f, "IndClass.{level}"),
            Expr::Unary {
                op: UnaryOp::Negate,
                operand,
            } => write!(f, "(-{operand})"),
            Expr::Binary { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Expr::Ternary {
                cond,
                then,
                otherwise,
            } => write!(f, "({cond} ? {then} : {otherwise})"),
            Expr::Call { name, args } => {
                write!(f, "{name}(")?;
                for (k, arg) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}
