use thiserror::Error;

use super::lexer::{tokenize, Operator, Position, Punct, Token, TokenKind};
use super::{BinaryOp, Expr, Input};
use crate::data::IndustryLevel;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{position}: {message}")]
pub struct ParseError {
    pub position: Position,
    pub message: String,
    /// What the parser was looking for, when that is informative.
    pub expected: Option<String>,
}

impl ParseError {
    fn new(position: Position, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
            expected: None,
        }
    }

    fn expecting(mut self, expected: impl Into<String>) -> Self {
        self.expected = Some(expected.into());
        self
    }
}

/// Parse one alpha expression.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(source).map_err(|e| ParseError::new(e.position, e.message))?;
    let end = end_position(source);
    if tokens.is_empty() {
        return Err(ParseError::new(end, "empty expression").expecting("an expression"));
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end,
        open_parens: Vec::new(),
    };
    let expr = parser.expression()?;
    if let Some(tok) = parser.peek() {
        let message = if tok.kind == TokenKind::Punct(Punct::RParen) {
            format!("unbalanced parenthesis at {}: unexpected `)`", tok.position)
        } else {
            format!("unexpected trailing `{}`", tok.text)
        };
        return Err(ParseError::new(tok.position, message).expecting("end of expression"));
    }
    Ok(expr)
}

fn end_position(source: &str) -> Position {
    let line = source.matches('\n').count() + 1;
    let column = source.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Position { line, column }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: Position,
    open_parens: Vec<Position>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn advance(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn at_operator(&self, op: Operator) -> bool {
        self.peek_kind() == Some(&TokenKind::Operator(op))
    }

    fn at_punct(&self, p: Punct) -> bool {
        self.peek_kind() == Some(&TokenKind::Punct(p))
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let position = self.peek().map_or(self.end, |t| t.position);
        ParseError::new(position, message)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            None => match self.open_parens.last() {
                Some(open) if expected == "`)`" || expected.contains("`)`") => ParseError::new(
                    self.end,
                    format!("unbalanced parenthesis at {open}: `(` is never closed"),
                ),
                _ => ParseError::new(self.end, "unexpected end of expression"),
            },
            Some(tok) => ParseError::new(tok.position, format!("unexpected `{}`", tok.text)),
        }
        .expecting(expected)
    }

    fn open_paren(&mut self) {
        let tok = self.advance().expect("caller checked for `(`");
        self.open_parens.push(tok.position);
    }

    fn close_paren(&mut self, expected: &str) -> Result<(), ParseError> {
        if self.at_punct(Punct::RParen) {
            self.advance();
            self.open_parens.pop();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expression(&mut self) -> Result<Expr, ParseError> {
        let cond = self.or_expr()?;
        if !self.at_punct(Punct::Question) {
            return Ok(cond);
        }
        self.advance();
        let then = self.expression()?;
        if !self.at_punct(Punct::Colon) {
            return Err(self.unexpected("`:` of a `?:` conditional"));
        }
        self.advance();
        let otherwise = self.expression()?;
        Ok(Expr::ternary(cond, then, otherwise))
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.comparison()?;
        while self.at_operator(Operator::OrOr) {
            self.advance();
            let rhs = self.comparison()?;
            lhs = Expr::binary(BinaryOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn comparison_op(&self) -> Option<BinaryOp> {
        match self.peek_kind()? {
            TokenKind::Operator(Operator::Lt) => Some(BinaryOp::Lt),
            TokenKind::Operator(Operator::Gt) => Some(BinaryOp::Gt),
            TokenKind::Operator(Operator::Le) => Some(BinaryOp::Le),
            TokenKind::Operator(Operator::Ge) => Some(BinaryOp::Ge),
            TokenKind::Operator(Operator::EqEq) => Some(BinaryOp::Eq),
            _ => None,
        }
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.additive()?;
        let Some(op) = self.comparison_op() else {
            return Ok(lhs);
        };
        self.advance();
        let rhs = self.additive()?;
        if self.comparison_op().is_some() {
            return Err(self
                .error_here("comparison operators do not chain; add parentheses")
                .expecting("`)`, `||`, `?` or end of expression"));
        }
        Ok(Expr::binary(op, lhs, rhs))
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = if self.at_operator(Operator::Plus) {
                BinaryOp::Add
            } else if self.at_operator(Operator::Minus) {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            self.advance();
            let rhs = self.multiplicative()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.at_operator(Operator::Star) {
                BinaryOp::Mul
            } else if self.at_operator(Operator::Slash) {
                BinaryOp::Div
            } else {
                return Ok(lhs);
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.at_operator(Operator::Minus) {
            self.advance();
            return Ok(Expr::negate(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.at_operator(Operator::Caret) {
            self.advance();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.unexpected("an operand"));
        };
        match tok.kind {
            TokenKind::Number(v) => {
                self.advance();
                Ok(Expr::Number(v))
            }
            TokenKind::Punct(Punct::LParen) => {
                self.open_paren();
                let inner = self.expression()?;
                self.close_paren("`)`")?;
                Ok(inner)
            }
            TokenKind::DottedIdentifier(ref name) => {
                self.advance();
                let level = name
                    .strip_prefix("indclass.")
                    .and_then(|l| l.parse::<IndustryLevel>().ok())
                    .ok_or_else(|| {
                        ParseError::new(tok.position, format!("unknown classification `{}`", tok.text))
                            .expecting("IndClass.sector, IndClass.industry or IndClass.subindustry")
                    })?;
                Ok(Expr::Group(level))
            }
            TokenKind::Identifier(ref name) => {
                self.advance();
                if self.at_punct(Punct::LParen) {
                    self.open_paren();
                    let args = self.arguments()?;
                    return Ok(Expr::Call {
                        name: name.clone(),
                        args,
                    });
                }
                name.parse::<Input>().map(Expr::Input).map_err(|_| {
                    ParseError::new(tok.position, format!("unknown input `{}`", tok.text)).expecting(
                        "returns, open, close, high, low, volume, vwap, cap, adv<d> or a function call",
                    )
                })
            }
            _ => Err(self.unexpected("an operand")),
        }
    }

    /// Arguments after an opening `(`, through the closing `)`.
    fn arguments(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut args = Vec::new();
        if self.at_punct(Punct::RParen) {
            self.close_paren("`)`")?;
            return Ok(args);
        }
        loop {
            args.push(self.expression()?);
            if self.at_punct(Punct::Comma) {
                self.advance();
                continue;
            }
            self.close_paren("`,` or `)`")?;
            return Ok(args);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::UnaryOp;

    fn input(name: &str) -> Expr {
        Expr::Input(name.parse().unwrap())
    }

    #[test]
    fn multiplication_binds_tighter() {
        // `a`, `b`, `c` are not inputs, so use real series names
        let e = parse("open + high * low").unwrap();
        assert_eq!(
            e,
            Expr::binary(
                BinaryOp::Add,
                input("open"),
                Expr::binary(BinaryOp::Mul, input("high"), input("low"))
            )
        );
    }

    #[test]
    fn ternary_with_comparison() {
        let e = parse("(adv20 < volume) ? close : open").unwrap();
        assert_eq!(
            e,
            Expr::ternary(
                Expr::binary(BinaryOp::Lt, input("adv20"), input("volume")),
                input("close"),
                input("open")
            )
        );
    }

    #[test]
    fn power_literal() {
        assert_eq!(
            parse("close^5").unwrap(),
            Expr::binary(BinaryOp::Pow, input("close"), Expr::Number(5.0))
        );
    }

    #[test]
    fn unary_minus_binds_literal() {
        let e = parse("-1 * delta(close, 1)").unwrap();
        assert_eq!(
            e,
            Expr::binary(
                BinaryOp::Mul,
                Expr::Unary {
                    op: UnaryOp::Negate,
                    operand: Box::new(Expr::Number(1.0))
                },
                Expr::call("delta", vec![input("close"), Expr::Number(1.0)])
            )
        );
    }

    #[test]
    fn power_is_right_associative_and_tighter_than_negation() {
        let e = parse("-close^2^3").unwrap();
        let expected = Expr::negate(Expr::binary(
            BinaryOp::Pow,
            input("close"),
            Expr::binary(BinaryOp::Pow, Expr::Number(2.0), Expr::Number(3.0)),
        ));
        assert_eq!(e, expected);
    }

    #[test]
    fn or_is_looser_than_comparison() {
        let e = parse("(1 < volume) || (volume == 1)").unwrap();
        assert!(matches!(e, Expr::Binary { op: BinaryOp::Or, .. }));
        let bare = parse("1 < volume || volume == 1").unwrap();
        assert_eq!(e, bare);
    }

    #[test]
    fn ternary_is_right_associative() {
        let e = parse("close ? open : high ? low : vwap").unwrap();
        assert_eq!(
            e,
            Expr::ternary(
                input("close"),
                input("open"),
                Expr::ternary(input("high"), input("low"), input("vwap"))
            )
        );
    }

    #[test]
    fn times_negative_literal() {
        let e = parse("(close * -1)").unwrap();
        assert_eq!(
            e,
            Expr::binary(BinaryOp::Mul, input("close"), Expr::negate(Expr::Number(1.0)))
        );
    }

    #[test]
    fn chained_comparison_rejected() {
        assert!(parse("open < close < high").is_err());
    }

    #[test]
    fn unbalanced_open_paren() {
        let err = parse("rank(close").unwrap_err();
        assert!(err.message.contains("unbalanced parenthesis"), "{err}");
        assert!(err.message.contains("1:5"), "{err}");
    }

    #[test]
    fn stray_close_paren() {
        let err = parse("rank(close))").unwrap_err();
        assert!(err.message.contains("unbalanced parenthesis"));
        assert_eq!(err.position.column, 12);
    }

    #[test]
    fn misplaced_ternary() {
        let err = parse("close ? open").unwrap_err();
        assert!(err.expected.unwrap().contains(':'));
        assert!(parse("? close : open").is_err());
    }

    #[test]
    fn group_reference() {
        let e = parse("indneutralize(close, IndClass.Sector)").unwrap();
        assert_eq!(
            e,
            Expr::call("indneutralize", vec![input("close"), Expr::Group(IndustryLevel::Sector)])
        );
        assert!(parse("IndClass.galaxy").is_err());
    }

    #[test]
    fn unknown_bare_identifier() {
        let err = parse("foo + 1").unwrap_err();
        assert!(err.message.contains("unknown input"));
    }

    #[test]
    fn empty_source() {
        assert!(parse("   ").is_err());
    }
}
