//! Hand-rolled lexer. Tracks line/column positions and collects lint
//! suppression comments as it goes.

use crate::rational::{parse_decimal, Rational};
use crate::syntax::ast::{Pos, Span, Suppression};
use crate::syntax::parser::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Quantvar,
    KwBegin,
    KwIn,
    KwEnd,
    KwFun,
    KwIs,
    KwIf,
    KwThen,
    KwElse,
    KwFloat,
    KwOf,
    KwNamed,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Assign,
    Lt,
    Le,
    EqEq,
    Ge,
    Gt,
    Eof,
}

impl TokenKind {
    /// How the token reads in diagnostics.
    pub fn describe(self) -> &'static str {
        match self {
            TokenKind::Ident => "an identifier",
            TokenKind::Number => "a number",
            TokenKind::Quantvar => "a quantity variable",
            TokenKind::KwBegin => "`begin`",
            TokenKind::KwIn => "`in`",
            TokenKind::KwEnd => "`end`",
            TokenKind::KwFun => "`fun`",
            TokenKind::KwIs => "`is`",
            TokenKind::KwIf => "`if`",
            TokenKind::KwThen => "`then`",
            TokenKind::KwElse => "`else`",
            TokenKind::KwFloat => "`float`",
            TokenKind::KwOf => "`of`",
            TokenKind::KwNamed => "`named`",
            TokenKind::Plus => "`+`",
            TokenKind::Minus => "`-`",
            TokenKind::Star => "`*`",
            TokenKind::Slash => "`/`",
            TokenKind::Caret => "`^`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::Comma => "`,`",
            TokenKind::Semi => "`;`",
            TokenKind::Colon => "`:`",
            TokenKind::Assign => "`:=`",
            TokenKind::Lt => "`<`",
            TokenKind::Le => "`<=`",
            TokenKind::EqEq => "`=`",
            TokenKind::Ge => "`>=`",
            TokenKind::Gt => "`>`",
            TokenKind::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub value: Option<Rational>,
    pub span: Span,
}

pub struct LexOutput {
    pub tokens: Vec<Token>,
    pub suppressions: Vec<Suppression>,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    offset: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn pos(&self) -> Pos {
        Pos {
            offset: self.offset,
            line: self.line,
            column: self.column,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.offset).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.bytes.get(self.offset + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.offset += 1;
        if b == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(b)
    }
}

pub fn lex(src: &str) -> Result<LexOutput, ParseError> {
    let mut lx = Lexer {
        src,
        bytes: src.as_bytes(),
        offset: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut suppressions = Vec::new();

    loop {
        // Skip whitespace and comments, harvesting suppressions.
        loop {
            match lx.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    lx.bump();
                }
                Some(b'-') if lx.peek2() == Some(b'-') => {
                    let line = lx.line;
                    let start = lx.offset;
                    while lx.peek().is_some_and(|b| b != b'\n') {
                        lx.bump();
                    }
                    if let Some(s) = suppression_from_comment(&lx.src[start..lx.offset], line) {
                        suppressions.push(s);
                    }
                }
                _ => break,
            }
        }

        let start = lx.pos();
        let Some(b) = lx.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                text: String::new(),
                value: None,
                span: Span { start, end: start },
            });
            break;
        };

        let kind = match b {
            b'+' => {
                lx.bump();
                TokenKind::Plus
            }
            b'-' => {
                lx.bump();
                TokenKind::Minus
            }
            b'*' => {
                lx.bump();
                TokenKind::Star
            }
            b'/' => {
                lx.bump();
                TokenKind::Slash
            }
            b'^' => {
                lx.bump();
                TokenKind::Caret
            }
            b'(' => {
                lx.bump();
                TokenKind::LParen
            }
            b')' => {
                lx.bump();
                TokenKind::RParen
            }
            b',' => {
                lx.bump();
                TokenKind::Comma
            }
            b';' => {
                lx.bump();
                TokenKind::Semi
            }
            b':' => {
                lx.bump();
                if lx.peek() == Some(b'=') {
                    lx.bump();
                    TokenKind::Assign
                } else {
                    TokenKind::Colon
                }
            }
            b'<' => {
                lx.bump();
                if lx.peek() == Some(b'=') {
                    lx.bump();
                    TokenKind::Le
                } else {
                    TokenKind::Lt
                }
            }
            b'>' => {
                lx.bump();
                if lx.peek() == Some(b'=') {
                    lx.bump();
                    TokenKind::Ge
                } else {
                    TokenKind::Gt
                }
            }
            b'=' => {
                lx.bump();
                TokenKind::EqEq
            }
            b'?' => {
                lx.bump();
                if !lx.peek().is_some_and(is_ident_start) {
                    return Err(unexpected(start, "`?` not followed by an identifier"));
                }
                while lx.peek().is_some_and(is_ident_continue) {
                    lx.bump();
                }
                TokenKind::Quantvar
            }
            b if b.is_ascii_digit() => {
                while lx.peek().is_some_and(|b| b.is_ascii_digit()) {
                    lx.bump();
                }
                if lx.peek() == Some(b'.') && lx.peek2().is_some_and(|b| b.is_ascii_digit()) {
                    lx.bump();
                    while lx.peek().is_some_and(|b| b.is_ascii_digit()) {
                        lx.bump();
                    }
                }
                TokenKind::Number
            }
            b if is_ident_start(b) => {
                while lx.peek().is_some_and(is_ident_continue) {
                    lx.bump();
                }
                keyword_or_ident(&lx.src[start.offset..lx.offset])
            }
            other => {
                return Err(unexpected(start, &format!("character `{}`", other as char)));
            }
        };

        let end = lx.pos();
        let raw = &lx.src[start.offset..end.offset];
        let (text, value) = match kind {
            TokenKind::Number => {
                let v = parse_decimal(raw).ok_or_else(|| unexpected(start, "malformed number"))?;
                (raw.to_string(), Some(v))
            }
            TokenKind::Quantvar => (raw[1..].to_string(), None),
            _ => (raw.to_string(), None),
        };
        tokens.push(Token {
            kind,
            text,
            value,
            span: Span { start, end },
        });
    }

    Ok(LexOutput {
        tokens,
        suppressions,
    })
}

fn unexpected(pos: Pos, found: &str) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        kind: ParseErrorKind::UnexpectedToken {
            expected: vec!["a token".to_string()],
            found: found.to_string(),
        },
    }
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_continue(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn keyword_or_ident(word: &str) -> TokenKind {
    match word {
        "begin" => TokenKind::KwBegin,
        "in" => TokenKind::KwIn,
        "end" => TokenKind::KwEnd,
        "fun" => TokenKind::KwFun,
        "is" => TokenKind::KwIs,
        "if" => TokenKind::KwIf,
        "then" => TokenKind::KwThen,
        "else" => TokenKind::KwElse,
        "float" => TokenKind::KwFloat,
        "of" => TokenKind::KwOf,
        "named" => TokenKind::KwNamed,
        _ => TokenKind::Ident,
    }
}

/// Recognizes `-- quantlint: allow RULE[, RULE]` comments.
fn suppression_from_comment(comment: &str, line: u32) -> Option<Suppression> {
    let body = comment.strip_prefix("--")?.trim();
    let rest = body.strip_prefix("quantlint:")?.trim();
    let rules_text = rest.strip_prefix("allow")?.trim();
    let rules: Vec<String> = rules_text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    if rules.is_empty() {
        return None;
    }
    Some(Suppression { line, rules })
}
