//! Recursive-descent parser. Stops at the first error and reports the
//! position together with the set of tokens that would have been accepted.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::quantity::QuantName;
use crate::syntax::ast::*;
use crate::syntax::lexer::{lex, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedToken {
        expected: Vec<String>,
        found: String,
    },
    Invalid {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::UnexpectedToken { expected, found } => {
                write!(f, "expected {}, found {}", expected.join(" or "), found)
            }
            ParseErrorKind::Invalid { message } => write!(f, "{}", message),
        }
    }
}

pub fn parse(source: &str) -> Result<Program, ParseError> {
    let lexed = lex(source)?;
    let mut parser = Parser {
        src: source,
        tokens: lexed.tokens,
        pos: 0,
    };
    let mut program = parser.parse_program()?;
    program.suppressions = lexed.suppressions;
    Ok(program)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

/// Tokens that may appear inside a unit expression; scanning stops at the
/// first token outside this set (or at `)` closing an enclosing list).
const UNIT_TOKENS: [TokenKind; 8] = [
    TokenKind::Ident,
    TokenKind::Number,
    TokenKind::Star,
    TokenKind::Slash,
    TokenKind::Caret,
    TokenKind::Minus,
    TokenKind::LParen,
    TokenKind::RParen,
];

impl<'a> Parser<'a> {
    fn cur(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn at(&self, kind: TokenKind) -> bool {
        self.cur().kind == kind
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.at(kind) {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&[kind.describe()]))
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let t = self.cur();
        let found = match t.kind {
            TokenKind::Eof => "end of input".to_string(),
            _ => format!("`{}`", t.text),
        };
        ParseError {
            line: t.span.start.line,
            column: t.span.start.column,
            kind: ParseErrorKind::UnexpectedToken {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found,
            },
        }
    }

    fn invalid(&self, span: Span, message: String) -> ParseError {
        ParseError {
            line: span.start.line,
            column: span.start.column,
            kind: ParseErrorKind::Invalid { message },
        }
    }

    fn parse_program(&mut self) -> Result<Program, ParseError> {
        let begin = self.expect(TokenKind::KwBegin)?;
        let mut decls = Vec::new();
        let mut seen_vars: HashSet<String> = HashSet::new();
        loop {
            if self.at(TokenKind::KwIn) {
                break;
            }
            let decl = match self.cur().kind {
                TokenKind::KwFun => Decl::Fun(self.parse_fun()?),
                TokenKind::Ident => {
                    let d = self.parse_var_decl()?;
                    if !seen_vars.insert(d.var.clone()) {
                        return Err(
                            self.invalid(d.span, format!("variable `{}` declared twice", d.var))
                        );
                    }
                    Decl::Var(d)
                }
                _ => return Err(self.unexpected(&["a declaration", "`in`"])),
            };
            decls.push(decl);
            if self.at(TokenKind::Semi) {
                self.advance();
            } else if !self.at(TokenKind::KwIn) {
                return Err(self.unexpected(&["`;`", "`in`"]));
            }
        }
        self.expect(TokenKind::KwIn)?;
        let stmts = self.parse_stmts(TokenKind::KwEnd)?;
        let end = self.expect(TokenKind::KwEnd)?;
        self.expect(TokenKind::Eof)?;
        Ok(Program {
            decls,
            stmts,
            suppressions: Vec::new(),
            span: begin.span.to(end.span),
        })
    }

    fn parse_var_decl(&mut self) -> Result<Declaration, ParseError> {
        let name = self.expect(TokenKind::Ident)?;
        self.expect(TokenKind::Colon)?;
        self.expect(TokenKind::KwFloat)?;
        self.expect(TokenKind::KwOf)?;
        let (unit, unit_span) = self.scan_unit_text()?;
        let (quant, quant_span) = self.parse_named(false)?;
        let end = quant_span.unwrap_or(unit_span);
        Ok(Declaration {
            var: name.text,
            unit,
            unit_span,
            quant,
            span: name.span.to(end),
        })
    }

    fn parse_fun(&mut self) -> Result<FunctionDecl, ParseError> {
        let fun = self.expect(TokenKind::KwFun)?;
        let name = self.expect(TokenKind::Ident)?;
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        loop {
            if self.at(TokenKind::RParen) && params.is_empty() {
                return Err(self.unexpected(&["a parameter"]));
            }
            let param = self.parse_param()?;
            if !seen.insert(param.name.clone()) {
                return Err(self.invalid(
                    param.span,
                    format!(
                        "parameter `{}` declared twice in `{}`",
                        param.name, name.text
                    ),
                ));
            }
            params.push(param);
            if self.at(TokenKind::Comma) {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::Colon)?;
        let (return_unit, return_unit_span) = self.scan_unit_text()?;
        let (return_quant, return_quant_span) = self.parse_named(true)?;
        if let QuantName::Quantvar(q) = &return_quant {
            let bound = params
                .iter()
                .any(|p| matches!(&p.quant, QuantName::Quantvar(p_q) if p_q == q));
            if !bound {
                return Err(self.invalid(
                    return_quant_span.unwrap_or(return_unit_span),
                    format!(
                        "return quantity variable `?{}` does not appear in any parameter",
                        q
                    ),
                ));
            }
        }
        self.expect(TokenKind::KwIs)?;
        let body = self.parse_uexp()?;
        let span = fun.span.to(body.span());
        Ok(FunctionDecl {
            name: name.text,
            params,
            return_unit,
            return_unit_span,
            return_quant,
            body,
            span,
        })
    }

    fn parse_param(&mut self) -> Result<Param, ParseError> {
        let name = self.expect(TokenKind::Ident)?;
        self.expect(TokenKind::Colon)?;
        let (unit, unit_span) = self.scan_unit_text()?;
        let (quant, quant_span) = self.parse_named(true)?;
        let end = quant_span.unwrap_or(unit_span);
        Ok(Param {
            name: name.text,
            unit,
            unit_span,
            quant,
            span: name.span.to(end),
        })
    }

    /// Optional `named N` (or `named ?q` where quantity variables are
    /// allowed, i.e. in function signatures).
    fn parse_named(
        &mut self,
        allow_quantvar: bool,
    ) -> Result<(QuantName, Option<Span>), ParseError> {
        if !self.at(TokenKind::KwNamed) {
            return Ok((QuantName::Noname, None));
        }
        self.advance();
        match self.cur().kind {
            TokenKind::Ident => {
                let t = self.advance();
                Ok((QuantName::Named(t.text), Some(t.span)))
            }
            TokenKind::Quantvar => {
                let t = self.advance();
                if !allow_quantvar {
                    return Err(self.invalid(
                        t.span,
                        "quantity variables are only allowed in function signatures".to_string(),
                    ));
                }
                Ok((QuantName::Quantvar(t.text), Some(t.span)))
            }
            _ => Err(self.unexpected(&["a quantity name", "a quantity variable"])),
        }
    }

    /// Collects the raw text of a unit expression. The tokens themselves are
    /// not interpreted here; the unit table resolves the text later. Stops
    /// at the first non-unit token, or at `)` closing an enclosing list.
    fn scan_unit_text(&mut self) -> Result<(String, Span), ParseError> {
        let start = self.pos;
        let mut depth = 0usize;
        loop {
            let kind = self.cur().kind;
            if !UNIT_TOKENS.contains(&kind) {
                break;
            }
            match kind {
                TokenKind::LParen => depth += 1,
                TokenKind::RParen => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                _ => {}
            }
            self.advance();
        }
        if self.pos == start {
            return Err(self.unexpected(&["a unit expression"]));
        }
        let span = self.tokens[start].span.to(self.tokens[self.pos - 1].span);
        Ok((self.clean_slice(span), span))
    }

    /// Source slice with comments removed and whitespace collapsed, so the
    /// stored unit text is a single line that re-lexes to the same tokens.
    fn clean_slice(&self, span: Span) -> String {
        let slice = &self.src[span.start.offset..span.end.offset];
        let mut out = String::with_capacity(slice.len());
        let mut rest = slice;
        while let Some(i) = rest.find("--") {
            out.push_str(&rest[..i]);
            out.push(' ');
            rest = match rest[i..].find('\n') {
                Some(j) => &rest[i + j..],
                None => "",
            };
        }
        out.push_str(rest);
        let mut cleaned = String::with_capacity(out.len());
        let mut last_space = false;
        for c in out.chars() {
            if c.is_whitespace() {
                if !last_space && !cleaned.is_empty() {
                    cleaned.push(' ');
                }
                last_space = true;
            } else {
                cleaned.push(c);
                last_space = false;
            }
        }
        cleaned.trim_end().to_string()
    }

    fn parse_stmts(&mut self, terminator: TokenKind) -> Result<Vec<Statement>, ParseError> {
        let mut stmts = Vec::new();
        loop {
            if self.at(terminator) || self.at(TokenKind::KwElse) {
                break;
            }
            stmts.push(self.parse_stmt()?);
            if self.at(TokenKind::Semi) {
                self.advance();
            } else if !(self.at(terminator) || self.at(TokenKind::KwElse)) {
                return Err(self.unexpected(&["`;`", terminator.describe()]));
            }
        }
        Ok(stmts)
    }

    fn parse_stmt(&mut self) -> Result<Statement, ParseError> {
        match self.cur().kind {
            TokenKind::Ident => {
                let var = self.advance();
                self.expect(TokenKind::Assign)?;
                let value = self.parse_uexp()?;
                let span = var.span.to(value.span());
                Ok(Statement::Assign {
                    var: var.text,
                    var_span: var.span,
                    value,
                    span,
                })
            }
            TokenKind::KwIf => {
                let kw = self.advance();
                let guard = self.parse_bexp()?;
                self.expect(TokenKind::KwThen)?;
                let then_branch = self.parse_stmts(TokenKind::KwElse)?;
                self.expect(TokenKind::KwElse)?;
                let else_branch = self.parse_stmts(TokenKind::KwEnd)?;
                let end = self.expect(TokenKind::KwEnd)?;
                Ok(Statement::If {
                    guard,
                    then_branch,
                    else_branch,
                    span: kw.span.to(end.span),
                })
            }
            _ => Err(self.unexpected(&["a statement"])),
        }
    }

    fn parse_bexp(&mut self) -> Result<BoolExpression, ParseError> {
        let lhs = self.parse_uexp()?;
        let op = match self.cur().kind {
            TokenKind::Lt => CompareOp::Lt,
            TokenKind::Le => CompareOp::Le,
            TokenKind::EqEq => CompareOp::Eq,
            TokenKind::Ge => CompareOp::Ge,
            TokenKind::Gt => CompareOp::Gt,
            _ => return Err(self.unexpected(&["a comparison operator"])),
        };
        self.advance();
        let rhs = self.parse_uexp()?;
        let span = lhs.span().to(rhs.span());
        Ok(BoolExpression { op, lhs, rhs, span })
    }

    fn parse_uexp(&mut self) -> Result<UnitExpression, ParseError> {
        self.parse_add()
    }

    fn parse_add(&mut self) -> Result<UnitExpression, ParseError> {
        let mut lhs = self.parse_mul()?;
        loop {
            let op = self.cur().kind;
            if op != TokenKind::Plus && op != TokenKind::Minus {
                return Ok(lhs);
            }
            self.advance();
            let rhs = self.parse_mul()?;
            let span = lhs.span().to(rhs.span());
            lhs = if op == TokenKind::Plus {
                UnitExpression::Add {
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                    span,
                }
            } else {
                UnitExpression::Sub {
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                    span,
                }
            };
        }
    }

    fn parse_mul(&mut self) -> Result<UnitExpression, ParseError> {
        let mut lhs = self.parse_scalar_or_primary()?;
        loop {
            let op = self.cur().kind;
            if op != TokenKind::Star && op != TokenKind::Slash {
                return Ok(lhs);
            }
            self.advance();
            let rhs = self.parse_scalar_or_primary()?;
            let span = lhs.span().to(rhs.span());
            lhs = if op == TokenKind::Star {
                UnitExpression::Mul {
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                    span,
                }
            } else {
                UnitExpression::Div {
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                    span,
                }
            };
        }
    }

    /// Scalar literals appear only as the left operand of `*`.
    fn parse_scalar_or_primary(&mut self) -> Result<UnitExpression, ParseError> {
        if self.at(TokenKind::Number) {
            let number = self.advance();
            self.expect(TokenKind::Star)?;
            let value = self.parse_scalar_or_primary()?;
            let span = number.span.to(value.span());
            return Ok(UnitExpression::ScalarMul {
                scalar: number.value.expect("number token carries a value"),
                value: Box::new(value),
                span,
            });
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<UnitExpression, ParseError> {
        match self.cur().kind {
            TokenKind::Ident => {
                let name = self.advance();
                if !self.at(TokenKind::LParen) {
                    return Ok(UnitExpression::Var {
                        name: name.text,
                        span: name.span,
                    });
                }
                self.advance();
                let mut args = Vec::new();
                if !self.at(TokenKind::RParen) {
                    loop {
                        args.push(self.parse_uexp()?);
                        if self.at(TokenKind::Comma) {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                let rparen = self.expect(TokenKind::RParen)?;
                Ok(UnitExpression::Call {
                    function: name.text,
                    args,
                    span: name.span.to(rparen.span),
                })
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.parse_uexp()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected(&["a unit expression"])),
        }
    }
}
