//! Dimension vectors, unit specifications, and the unit symbol table.
//!
//! A unit is stored in product-of-powers form: a vector of rational
//! exponents over the base dimensions, together with an exact conversion
//! factor to the base representation. Checking works on exponent vectors
//! only; magnitudes are never evaluated.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, int, parse_rational, pow_exact, ratio, Rational};

/// Number of base dimensions the checker tracks: length, mass, time.
/// Widening this array (and the standard table) is the extension point for
/// the remaining SI base dimensions.
pub const BASE_DIMENSIONS: usize = 3;

pub const DIMENSION_NAMES: [&str; BASE_DIMENSIONS] = ["length", "mass", "time"];

/// Exponent vector over the base dimensions; `(0,0,0)` is dimensionless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dims {
    exponents: [Rational; BASE_DIMENSIONS],
}

impl Dims {
    pub fn new(exponents: [Rational; BASE_DIMENSIONS]) -> Self {
        Dims { exponents }
    }

    pub fn dimensionless() -> Self {
        Dims::new([int(0), int(0), int(0)])
    }

    /// Unit vector along one base dimension.
    pub fn base(axis: usize) -> Self {
        let mut d = Dims::dimensionless();
        d.exponents[axis] = int(1);
        d
    }

    pub fn from_ints(length: i64, mass: i64, time: i64) -> Self {
        Dims::new([int(length), int(mass), int(time)])
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.exponents
    }

    pub fn is_dimensionless(&self) -> bool {
        self.exponents.iter().all(|e| e.is_zero())
    }

    fn zip_with(&self, other: &Dims, f: impl Fn(&Rational, &Rational) -> Rational) -> Dims {
        let mut exponents = self.exponents.clone();
        for (e, o) in exponents.iter_mut().zip(other.exponents.iter()) {
            *e = f(e, o);
        }
        Dims { exponents }
    }

    fn scale(&self, k: &Rational) -> Dims {
        let mut exponents = self.exponents.clone();
        for e in exponents.iter_mut() {
            *e = &*e * k;
        }
        Dims { exponents }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", format_rational(e))?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dimensions {left} and {right} are not homogeneous")]
pub struct DimMismatch {
    pub left: Dims,
    pub right: Dims,
}

/// Addition of quantities requires dimensional homogeneity: defined only
/// when both vectors agree componentwise, in which case it returns them.
pub fn dim_add(d1: &Dims, d2: &Dims) -> Result<Dims, DimMismatch> {
    if d1 == d2 {
        Ok(d1.clone())
    } else {
        Err(DimMismatch {
            left: d1.clone(),
            right: d2.clone(),
        })
    }
}

/// Multiplication sums the exponent vectors.
pub fn dim_mul(d1: &Dims, d2: &Dims) -> Dims {
    d1.zip_with(d2, |a, b| a + b)
}

/// Division subtracts the exponent vectors; the inverse of [`dim_mul`].
pub fn dim_div(d1: &Dims, d2: &Dims) -> Dims {
    d1.zip_with(d2, |a, b| a - b)
}

/// A resolved unit: its dimensions, a positive rational factor to the base
/// representation, and an affine offset (nonzero only for standalone units
/// in the temperature style, which are barred from composition).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSpec {
    pub dims: Dims,
    pub factor: Rational,
    pub offset: Rational,
}

impl UnitSpec {
    pub fn linear(dims: Dims, factor: Rational) -> Self {
        debug_assert!(factor.is_positive(), "unit factors must be positive");
        UnitSpec {
            dims,
            factor,
            offset: int(0),
        }
    }

    pub fn is_affine(&self) -> bool {
        !self.offset.is_zero()
    }
}

/// A conversion between commensurable units: `v_to = scale * v_from + offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversion {
    pub scale: Rational,
    pub offset: Rational,
}

impl Conversion {
    pub fn is_identity(&self) -> bool {
        self.scale.is_one() && self.offset.is_zero()
    }

    pub fn is_linear(&self) -> bool {
        self.offset.is_zero()
    }
}

impl fmt::Display for Conversion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_linear() {
            write!(f, "{}", format_rational(&self.scale))
        } else {
            write!(
                f,
                "scale {}, offset {}",
                format_rational(&self.scale),
                format_rational(&self.offset)
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("units with dimensions {from} and {to} are incommensurable")]
pub struct Incommensurable {
    pub from: Dims,
    pub to: Dims,
}

/// The conversion taking values in `from` to values in `to`. For linear
/// pairs this is the factor `from.factor / to.factor`; affine pairs get a
/// scale and offset.
pub fn conversion_factor(from: &UnitSpec, to: &UnitSpec) -> Result<Conversion, Incommensurable> {
    if from.dims != to.dims {
        return Err(Incommensurable {
            from: from.dims.clone(),
            to: to.dims.clone(),
        });
    }
    let scale = &from.factor / &to.factor;
    let offset = (&from.offset - &to.offset) / &to.factor;
    Ok(Conversion { scale, offset })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitError {
    #[error("unknown unit symbol `{0}`")]
    UnknownUnit(String),
    #[error("affine unit `{0}` cannot appear in a composed unit expression")]
    AffineComposition(String),
    #[error("`{symbol}^{exponent}` has no exact conversion factor")]
    InexactPower { symbol: String, exponent: String },
    #[error("malformed unit expression: {0}")]
    Syntax(String),
}

/// Symbol table mapping surface unit symbols to their specifications.
#[derive(Debug, Clone, Default)]
pub struct UnitTable {
    entries: BTreeMap<String, UnitSpec>,
}

impl UnitTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Base units (m, kg, s), the derived aliases Hz, N, Pa, J, W, and the
    /// international imperial lengths.
    pub fn standard() -> Self {
        let mut table = UnitTable::empty();
        table.define("m", UnitSpec::linear(Dims::base(0), int(1)));
        table.define("kg", UnitSpec::linear(Dims::base(1), int(1)));
        table.define("s", UnitSpec::linear(Dims::base(2), int(1)));
        for (symbol, definition) in [
            ("Hz", "s^-1"),
            ("N", "m * kg * s^-2"),
            ("Pa", "m^-1 * kg * s^-2"),
            ("J", "m^2 * kg * s^-2"),
            ("W", "m^2 * kg * s^-3"),
        ] {
            let spec = unit_to_spec(definition, &table)
                .unwrap_or_else(|e| panic!("bad builtin {}: {}", symbol, e));
            table.define(symbol, spec);
        }
        // International yard and pound agreement: 1 yard = 0.9144 m exactly.
        table.define("yard", UnitSpec::linear(Dims::base(0), ratio(1143, 1250)));
        table.define("foot", UnitSpec::linear(Dims::base(0), ratio(381, 1250)));
        table.define("mile", UnitSpec::linear(Dims::base(0), ratio(201168, 125)));
        table
    }

    /// Inserts or shadows a definition.
    pub fn define(&mut self, symbol: impl Into<String>, spec: UnitSpec) {
        self.entries.insert(symbol.into(), spec);
    }

    pub fn get(&self, symbol: &str) -> Option<&UnitSpec> {
        self.entries.get(symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    /// Loads a line-oriented overlay:
    ///
    /// ```text
    /// symbol = <unit-expression> [factor <rational>] [offset <rational>]
    /// ```
    ///
    /// Later definitions shadow earlier ones (including the standard table).
    /// `--` starts a comment.
    pub fn load_overlay(&mut self, text: &str) -> Result<(), OverlayError> {
        for (index, raw) in text.lines().enumerate() {
            let line = match raw.find("--") {
                Some(i) => &raw[..i],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            self.load_overlay_line(line)
                .map_err(|message| OverlayError {
                    line: index + 1,
                    message,
                })?;
        }
        Ok(())
    }

    fn load_overlay_line(&mut self, line: &str) -> Result<(), String> {
        let (symbol, rest) = line
            .split_once('=')
            .ok_or_else(|| "expected `symbol = <unit-expression> ...`".to_string())?;
        let symbol = symbol.trim();
        if symbol.is_empty() || !is_symbol(symbol) {
            return Err(format!("`{}` is not a valid unit symbol", symbol));
        }
        let rest = rest.trim();

        // Split off the trailing modifiers before parsing the expression.
        let mut expr = rest;
        let mut factor_text = None;
        let mut offset_text = None;
        if let Some(i) = find_keyword(expr, "offset") {
            offset_text = Some(expr[i + "offset".len()..].trim());
            expr = expr[..i].trim_end();
        }
        if let Some(i) = find_keyword(expr, "factor") {
            factor_text = Some(expr[i + "factor".len()..].trim());
            expr = expr[..i].trim_end();
        }

        let mut spec = unit_to_spec(expr, self).map_err(|e| e.to_string())?;
        if let Some(text) = factor_text {
            if spec.is_affine() {
                return Err("cannot scale an affine unit".to_string());
            }
            let f = parse_rational(text).ok_or_else(|| format!("`{}` is not a rational", text))?;
            if !f.is_positive() {
                return Err("factor must be positive".to_string());
            }
            spec.factor *= f;
        }
        if let Some(text) = offset_text {
            if spec.is_affine() {
                return Err("base unit already carries an offset".to_string());
            }
            spec.offset =
                parse_rational(text).ok_or_else(|| format!("`{}` is not a rational", text))?;
        }
        self.define(symbol, spec);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("overlay line {line}: {message}")]
pub struct OverlayError {
    pub line: usize,
    pub message: String,
}

fn is_symbol(text: &str) -> bool {
    let mut chars = text.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Finds `keyword` in `text` at a token boundary (so a unit symbol that
/// merely contains the word is left alone).
fn find_keyword(text: &str, keyword: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut start = 0;
    while let Some(i) = text[start..].find(keyword) {
        let at = start + i;
        let before_ok = at == 0 || !(bytes[at - 1] as char).is_ascii_alphanumeric();
        let after = at + keyword.len();
        let after_ok = after >= text.len() || !(bytes[after] as char).is_ascii_alphanumeric();
        if before_ok && after_ok {
            return Some(at);
        }
        start = at + keyword.len();
    }
    None
}

// ── unit-expression parsing ─────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
enum UTok {
    Sym(String),
    Int(BigInt),
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Minus,
}

fn unit_lex(text: &str) -> Result<Vec<UTok>, UnitError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '*' => {
                chars.next();
                toks.push(UTok::Star);
            }
            '/' => {
                chars.next();
                toks.push(UTok::Slash);
            }
            '^' => {
                chars.next();
                toks.push(UTok::Caret);
            }
            '(' => {
                chars.next();
                toks.push(UTok::LParen);
            }
            ')' => {
                chars.next();
                toks.push(UTok::RParen);
            }
            '-' => {
                chars.next();
                toks.push(UTok::Minus);
            }
            c if c.is_ascii_digit() => {
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        end = j;
                        chars.next();
                    } else {
                        break;
                    }
                }
                let n: BigInt = text[i..=end].parse().expect("digits");
                toks.push(UTok::Int(n));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        end = j;
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(UTok::Sym(text[i..=end].to_string()));
            }
            other => {
                return Err(UnitError::Syntax(format!(
                    "unexpected character `{}`",
                    other
                )))
            }
        }
    }
    Ok(toks)
}

struct UnitParser<'a> {
    toks: &'a [UTok],
    pos: usize,
    table: &'a UnitTable,
}

impl<'a> UnitParser<'a> {
    fn peek(&self) -> Option<&UTok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&UTok> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn parse_expr(&mut self) -> Result<UnitSpec, UnitError> {
        let mut spec = self.parse_item()?;
        loop {
            match self.peek() {
                Some(UTok::Star) => {
                    self.pos += 1;
                    let rhs = self.parse_item()?;
                    spec = UnitSpec {
                        dims: dim_mul(&spec.dims, &rhs.dims),
                        factor: &spec.factor * &rhs.factor,
                        offset: int(0),
                    };
                }
                Some(UTok::Slash) => {
                    self.pos += 1;
                    let rhs = self.parse_item()?;
                    spec = UnitSpec {
                        dims: dim_div(&spec.dims, &rhs.dims),
                        factor: &spec.factor / &rhs.factor,
                        offset: int(0),
                    };
                }
                None => return Ok(spec),
                Some(other) => {
                    return Err(UnitError::Syntax(format!(
                        "unexpected token {:?} after unit expression",
                        other
                    )))
                }
            }
        }
    }

    /// One item: `1`, or a symbol with an optional integer or parenthesised
    /// rational exponent.
    fn parse_item(&mut self) -> Result<UnitSpec, UnitError> {
        let (symbol, base) = match self.next().cloned() {
            Some(UTok::Int(n)) if n.is_one() => {
                return Ok(UnitSpec::linear(Dims::dimensionless(), int(1)));
            }
            Some(UTok::Sym(s)) => {
                let spec = self
                    .table
                    .get(&s)
                    .cloned()
                    .ok_or_else(|| UnitError::UnknownUnit(s.clone()))?;
                (s, spec)
            }
            other => {
                return Err(UnitError::Syntax(format!(
                    "expected a unit symbol, found {:?}",
                    other
                )))
            }
        };
        if self.peek() != Some(&UTok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let exponent = self.parse_exponent()?;
        if base.is_affine() {
            return Err(UnitError::AffineComposition(symbol));
        }
        let factor = pow_exact(&base.factor, &exponent).ok_or_else(|| UnitError::InexactPower {
            symbol: symbol.clone(),
            exponent: format_rational(&exponent),
        })?;
        Ok(UnitSpec::linear(base.dims.scale(&exponent), factor))
    }

    /// `2`, `-2`, or `(p/q)` with optionally signed numerator.
    fn parse_exponent(&mut self) -> Result<Rational, UnitError> {
        let parenthesised = self.peek() == Some(&UTok::LParen);
        if parenthesised {
            self.pos += 1;
        }
        let negative = self.peek() == Some(&UTok::Minus);
        if negative {
            self.pos += 1;
        }
        let numer = match self.next().cloned() {
            Some(UTok::Int(n)) => n,
            other => {
                return Err(UnitError::Syntax(format!(
                    "expected an exponent, found {:?}",
                    other
                )))
            }
        };
        let mut value = Rational::from_integer(numer);
        if parenthesised {
            if self.peek() == Some(&UTok::Slash) {
                self.pos += 1;
                let denom = match self.next().cloned() {
                    Some(UTok::Int(n)) if !n.is_zero() => n,
                    other => {
                        return Err(UnitError::Syntax(format!(
                            "expected a nonzero denominator, found {:?}",
                            other
                        )))
                    }
                };
                value /= Rational::from_integer(denom);
            }
            if self.next() != Some(&UTok::RParen) {
                return Err(UnitError::Syntax("expected `)` after exponent".to_string()));
            }
        }
        Ok(if negative { -value } else { value })
    }
}

/// Resolves a textual unit expression (`J`, `m * s^-1`, `kg * m^2`) against
/// a table. Dimensions compose through [`dim_mul`]/[`dim_div`]; factors
/// compose multiplicatively with exponents applied exactly. Affine units may
/// only appear as the entire expression.
pub fn unit_to_spec(expr: &str, table: &UnitTable) -> Result<UnitSpec, UnitError> {
    let toks = unit_lex(expr)?;
    if toks.is_empty() {
        return Err(UnitError::Syntax("empty unit expression".to_string()));
    }
    // A lone affine symbol is fine; composition with one is not.
    if let [UTok::Sym(s)] = toks.as_slice() {
        return table
            .get(s)
            .cloned()
            .ok_or_else(|| UnitError::UnknownUnit(s.clone()));
    }
    let affine = toks.iter().find_map(|t| match t {
        UTok::Sym(s) if table.get(s).is_some_and(UnitSpec::is_affine) => Some(s.clone()),
        _ => None,
    });
    if let Some(symbol) = affine {
        return Err(UnitError::AffineComposition(symbol));
    }
    let mut parser = UnitParser {
        toks: &toks,
        pos: 0,
        table,
    };
    parser.parse_expr()
}
