//! Uniform diagnostics for the driver: every pass's findings are lowered to
//! one serializable record with a file, a resolved span, a phase, a stable
//! code, and a message.

use serde::{Deserialize, Serialize};

use crate::dim_check::{DimDiagKind, DimDiagnostic};
use crate::lint::{LintRule, LintWarning};
use crate::quant_check::{QuantError, QuantErrorKind};
use crate::syntax::ast::Span;
use crate::syntax::ParseError;

pub mod codes {
    pub const PARSE: &str = "PARSE-ERROR";
    pub const IO: &str = "IO-ERROR";
    pub const DIM_MISMATCH: &str = "DIM-MISMATCH";
    pub const UNKNOWN_UNIT: &str = "UNKNOWN-UNIT";
    pub const BAD_UNIT: &str = "BAD-UNIT";
    pub const DUPLICATE_DECL: &str = "DUPLICATE-DECL";
    pub const UNBOUND_VAR: &str = "UNBOUND-VAR";
    pub const UNKNOWN_FUN: &str = "UNKNOWN-FUN";
    pub const ARITY_MISMATCH: &str = "ARITY-MISMATCH";
    pub const AFFINE_UNIT: &str = "AFFINE-UNIT";
    pub const CONV_NOTE: &str = "CONV-NOTE";
    pub const KOQ_TYPE1: &str = "KOQ-TYPE1";
    pub const KOQ_UNIFY: &str = "KOQ-UNIFY";
    pub const QUANT_INTERNAL: &str = "QUANT-INTERNAL";
    pub const BRANCH_NOTE: &str = "BRANCH-NOTE";
    pub const DISC_MUL: &str = "DISC-MUL";
    pub const DISC_NONAME_ASSIGN: &str = "DISC-NONAME-ASSIGN";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Parse,
    Dims,
    Quant,
    Lint,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Parse => "parse",
            Phase::Dims => "dims",
            Phase::Quant => "quant",
            Phase::Lint => "lint",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Note,
}

impl Severity {
    pub fn name(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Note => "note",
        }
    }
}

/// A resolved span: 1-based line/column pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagSpan {
    pub start_line: u32,
    pub start_column: u32,
    pub end_line: u32,
    pub end_column: u32,
}

impl From<Span> for DiagSpan {
    fn from(span: Span) -> Self {
        DiagSpan {
            start_line: span.start.line,
            start_column: span.start.column,
            end_line: span.end.line,
            end_column: span.end.column,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub span: DiagSpan,
    pub phase: Phase,
    pub severity: Severity,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub related: Vec<String>,
}

impl Diagnostic {
    /// Sort key: file, then span start, then phase.
    pub fn sort_key(&self) -> (String, u32, u32, Phase, String) {
        (
            self.file.clone(),
            self.span.start_line,
            self.span.start_column,
            self.phase,
            self.code.clone(),
        )
    }

    pub fn render(&self) -> String {
        let related = if self.related.is_empty() {
            String::new()
        } else {
            format!(" [{}]", self.related.join("; "))
        };
        format!(
            "{}:{}:{}: {} {} {}: {}{}",
            self.file,
            self.span.start_line,
            self.span.start_column,
            self.phase.name(),
            self.severity.name(),
            self.code,
            self.message,
            related
        )
    }

    pub fn from_parse_error(file: &str, error: &ParseError) -> Diagnostic {
        Diagnostic {
            file: file.to_string(),
            span: DiagSpan {
                start_line: error.line,
                start_column: error.column,
                end_line: error.line,
                end_column: error.column,
            },
            phase: Phase::Parse,
            severity: Severity::Error,
            code: codes::PARSE.to_string(),
            message: error.to_string(),
            related: Vec::new(),
        }
    }

    pub fn from_dim(file: &str, d: &DimDiagnostic) -> Diagnostic {
        let (code, severity, related) = match &d.kind {
            DimDiagKind::Mismatch {
                expected, found, ..
            } => (
                codes::DIM_MISMATCH,
                Severity::Error,
                vec![format!("expected {}", expected), format!("found {}", found)],
            ),
            DimDiagKind::UnknownUnit { .. } => (codes::UNKNOWN_UNIT, Severity::Error, vec![]),
            DimDiagKind::BadUnit { .. } => (codes::BAD_UNIT, Severity::Error, vec![]),
            DimDiagKind::DuplicateDecl { .. } | DimDiagKind::DuplicateFunction { .. } => {
                (codes::DUPLICATE_DECL, Severity::Error, vec![])
            }
            DimDiagKind::UnboundVariable { .. } => (codes::UNBOUND_VAR, Severity::Error, vec![]),
            DimDiagKind::UnknownFunction { .. } => (codes::UNKNOWN_FUN, Severity::Error, vec![]),
            DimDiagKind::ArityMismatch { .. } => (codes::ARITY_MISMATCH, Severity::Error, vec![]),
            DimDiagKind::AffineOperand { .. } => (codes::AFFINE_UNIT, Severity::Error, vec![]),
            DimDiagKind::ConversionNote { .. } => (codes::CONV_NOTE, Severity::Note, vec![]),
        };
        Diagnostic {
            file: file.to_string(),
            span: d.loc.into(),
            phase: Phase::Dims,
            severity,
            code: code.to_string(),
            message: d.kind.to_string(),
            related,
        }
    }

    pub fn from_quant(file: &str, e: &QuantError) -> Diagnostic {
        let (code, severity, related) = match &e.kind {
            QuantErrorKind::AdditionMismatch { left, right } => (
                codes::KOQ_TYPE1,
                Severity::Error,
                vec![left.to_string(), right.to_string()],
            ),
            QuantErrorKind::AssignMismatch { bound, value, .. } => (
                codes::KOQ_TYPE1,
                Severity::Error,
                vec![
                    format!("target holds {}", bound),
                    format!("value is {}", value),
                ],
            ),
            QuantErrorKind::ArgumentMismatch {
                expected, found, ..
            } => (
                codes::KOQ_TYPE1,
                Severity::Error,
                vec![format!("expected {}", expected), format!("found {}", found)],
            ),
            QuantErrorKind::ReturnMismatch {
                declared, found, ..
            } => (
                codes::KOQ_TYPE1,
                Severity::Error,
                vec![
                    format!("declared {}", declared),
                    format!("body yields {}", found),
                ],
            ),
            QuantErrorKind::UnifyConflict { first, second, .. } => (
                codes::KOQ_UNIFY,
                Severity::Error,
                vec![first.to_string(), second.to_string()],
            ),
            QuantErrorKind::UnboundVariable { .. } => (codes::UNBOUND_VAR, Severity::Error, vec![]),
            QuantErrorKind::UnknownFunction { .. } => (codes::UNKNOWN_FUN, Severity::Error, vec![]),
            QuantErrorKind::ArityMismatch { .. } => {
                (codes::ARITY_MISMATCH, Severity::Error, vec![])
            }
            QuantErrorKind::DuplicateFunction { .. } => {
                (codes::DUPLICATE_DECL, Severity::Error, vec![])
            }
            QuantErrorKind::Internal { .. } => (codes::QUANT_INTERNAL, Severity::Error, vec![]),
            QuantErrorKind::BranchNote { .. } => (codes::BRANCH_NOTE, Severity::Note, vec![]),
        };
        Diagnostic {
            file: file.to_string(),
            span: e.loc.into(),
            phase: Phase::Quant,
            severity,
            code: code.to_string(),
            message: e.kind.to_string(),
            related,
        }
    }

    pub fn from_lint(file: &str, w: &LintWarning, strict: bool) -> Diagnostic {
        let code = match w.rule {
            LintRule::DiscMul => codes::DISC_MUL,
            LintRule::DiscNonameAssign => codes::DISC_NONAME_ASSIGN,
        };
        Diagnostic {
            file: file.to_string(),
            span: w.loc.into(),
            phase: Phase::Lint,
            severity: if strict {
                Severity::Error
            } else {
                Severity::Warning
            },
            code: code.to_string(),
            message: w.message.clone(),
            related: Vec::new(),
        }
    }
}
