use std::fmt;

use thiserror::Error;

/// 1-based line and column (in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    OrOr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    LParen,
    RParen,
    Comma,
    Question,
    Colon,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Number(f64),
    /// Lowercased identifier.
    Identifier(String),
    /// Lowercased `a.b` identifier such as `indclass.sector`.
    DottedIdentifier(String),
    Operator(Operator),
    Punct(Punct),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text as written.
    pub text: String,
    pub position: Position,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{position}: {message}")]
pub struct LexError {
    pub position: Position,
    pub message: String,
}

/// Split alpha source text into tokens. Whitespace separates tokens and is
/// otherwise ignored.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let position = Position { line, column };
        if c == '\n' {
            line += 1;
            column = 1;
            k += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            k += 1;
            continue;
        }
        let start = k;
        let kind = if c.is_ascii_digit() || (c == '.' && chars.get(k + 1).is_some_and(char::is_ascii_digit)) {
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            if k < chars.len() && chars[k] == '.' {
                k += 1;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
            }
            let text: String = chars[start..k].iter().collect();
            let value: f64 = text.parse().map_err(|_| LexError {
                position,
                message: format!("malformed number `{text}`"),
            })?;
            TokenKind::Number(value)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let ident_end = |mut j: usize| {
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                j
            };
            k = ident_end(k);
            let dotted = k + 1 < chars.len()
                && chars[k] == '.'
                && (chars[k + 1].is_ascii_alphabetic() || chars[k + 1] == '_');
            if dotted {
                k = ident_end(k + 1);
            }
            let text: String = chars[start..k].iter().collect::<String>().to_ascii_lowercase();
            if dotted {
                TokenKind::DottedIdentifier(text)
            } else {
                TokenKind::Identifier(text)
            }
        } else {
            let next = chars.get(k + 1).copied();
            let (kind, width) = match (c, next) {
                ('<', Some('=')) => (TokenKind::Operator(Operator::Le), 2),
                ('>', Some('=')) => (TokenKind::Operator(Operator::Ge), 2),
                ('=', Some('=')) => (TokenKind::Operator(Operator::EqEq), 2),
                ('|', Some('|')) => (TokenKind::Operator(Operator::OrOr), 2),
                ('+', _) => (TokenKind::Operator(Operator::Plus), 1),
                ('-', _) => (TokenKind::Operator(Operator::Minus), 1),
                ('*', _) => (TokenKind::Operator(Operator::Star), 1),
                ('/', _) => (TokenKind::Operator(Operator::Slash), 1),
                ('^', _) => (TokenKind::Operator(Operator::Caret), 1),
                ('<', _) => (TokenKind::Operator(Operator::Lt), 1),
                ('>', _) => (TokenKind::Operator(Operator::Gt), 1),
                ('(', _) => (TokenKind::Punct(Punct::LParen), 1),
                (')', _) => (TokenKind::Punct(Punct::RParen), 1),
                (',', _) => (TokenKind::Punct(Punct::Comma), 1),
                ('?', _) => (TokenKind::Punct(Punct::Question), 1),
                (':', _) => (TokenKind::Punct(Punct::Colon), 1),
                _ => {
                    return Err(LexError {
                        position,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            k += width;
            kind
        };
        let text: String = chars[start..k].iter().collect();
        column += k - start;
        tokens.push(Token {
            kind,
            text,
            position,
        });
    }
    Ok(tokens)
}
