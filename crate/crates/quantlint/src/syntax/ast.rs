//! Syntax trees with source spans.

use crate::quantity::QuantName;
use crate::rational::Rational;

/// A position in the source text; `line` and `column` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub offset: usize,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            start: self.start,
            end: other.end,
        }
    }

    pub fn contains(&self, inner: &Span) -> bool {
        self.start.offset <= inner.start.offset && inner.end.offset <= self.end.offset
    }
}

/// A lint suppression comment: `-- quantlint: allow RULE[, RULE]` guards the
/// line that follows it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suppression {
    pub line: u32,
    pub rules: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub stmts: Vec<Statement>,
    pub suppressions: Vec<Suppression>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Var(Declaration),
    Fun(FunctionDecl),
}

impl Decl {
    pub fn span(&self) -> Span {
        match self {
            Decl::Var(d) => d.span,
            Decl::Fun(f) => f.span,
        }
    }
}

/// `var : float of <unit> [named N]`; the quantity defaults to `Noname`.
#[derive(Debug, Clone, PartialEq)]
pub struct Declaration {
    pub var: String,
    pub unit: String,
    pub unit_span: Span,
    pub quant: QuantName,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub unit: String,
    pub unit_span: Span,
    pub quant: QuantName,
    pub span: Span,
}

/// `fun name (p : <unit> [named N], ...) : <unit> [named N] is <expr>`.
/// Quantity variables (`named ?q`) may appear only here.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub return_unit: String,
    pub return_unit_span: Span,
    pub return_quant: QuantName,
    pub body: UnitExpression,
    pub span: Span,
}

impl FunctionDecl {
    /// True when any parameter or the return carries a quantity variable.
    pub fn has_quantvars(&self) -> bool {
        self.return_quant.is_quantvar() || self.params.iter().any(|p| p.quant.is_quantvar())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Assign {
        var: String,
        var_span: Span,
        value: UnitExpression,
        span: Span,
    },
    If {
        guard: BoolExpression,
        then_branch: Vec<Statement>,
        else_branch: Vec<Statement>,
        span: Span,
    },
}

impl Statement {
    pub fn span(&self) -> Span {
        match self {
            Statement::Assign { span, .. } | Statement::If { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnitExpression {
    Var {
        name: String,
        span: Span,
    },
    Add {
        lhs: Box<UnitExpression>,
        rhs: Box<UnitExpression>,
        span: Span,
    },
    Sub {
        lhs: Box<UnitExpression>,
        rhs: Box<UnitExpression>,
        span: Span,
    },
    /// `r * e` for a rational literal `r`; transparent to both passes.
    ScalarMul {
        scalar: Rational,
        value: Box<UnitExpression>,
        span: Span,
    },
    Mul {
        lhs: Box<UnitExpression>,
        rhs: Box<UnitExpression>,
        span: Span,
    },
    Div {
        lhs: Box<UnitExpression>,
        rhs: Box<UnitExpression>,
        span: Span,
    },
    Call {
        function: String,
        args: Vec<UnitExpression>,
        span: Span,
    },
}

impl UnitExpression {
    pub fn span(&self) -> Span {
        match self {
            UnitExpression::Var { span, .. }
            | UnitExpression::Add { span, .. }
            | UnitExpression::Sub { span, .. }
            | UnitExpression::ScalarMul { span, .. }
            | UnitExpression::Mul { span, .. }
            | UnitExpression::Div { span, .. }
            | UnitExpression::Call { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CompareOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Eq => "=",
            CompareOp::Ge => ">=",
            CompareOp::Gt => ">",
        }
    }
}

/// Guards are comparisons between two unit expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct BoolExpression {
    pub op: CompareOp,
    pub lhs: UnitExpression,
    pub rhs: UnitExpression,
    pub span: Span,
}

// ── structural comparison ───────────────────────────────────────────────
//
// `strip_spans` zeroes every span (and drops suppression metadata, which is
// position-dependent) so that two parses of differently formatted sources
// can be compared structurally.

impl Program {
    pub fn strip_spans(&self) -> Program {
        Program {
            decls: self.decls.iter().map(Decl::strip_spans).collect(),
            stmts: self.stmts.iter().map(Statement::strip_spans).collect(),
            suppressions: Vec::new(),
            span: Span::default(),
        }
    }
}

impl Decl {
    pub fn strip_spans(&self) -> Decl {
        match self {
            Decl::Var(d) => Decl::Var(Declaration {
                unit_span: Span::default(),
                span: Span::default(),
                ..d.clone()
            }),
            Decl::Fun(f) => Decl::Fun(FunctionDecl {
                params: f
                    .params
                    .iter()
                    .map(|p| Param {
                        unit_span: Span::default(),
                        span: Span::default(),
                        ..p.clone()
                    })
                    .collect(),
                return_unit_span: Span::default(),
                body: f.body.strip_spans(),
                span: Span::default(),
                ..f.clone()
            }),
        }
    }
}

impl Statement {
    pub fn strip_spans(&self) -> Statement {
        match self {
            Statement::Assign { var, value, .. } => Statement::Assign {
                var: var.clone(),
                var_span: Span::default(),
                value: value.strip_spans(),
                span: Span::default(),
            },
            Statement::If {
                guard,
                then_branch,
                else_branch,
                ..
            } => Statement::If {
                guard: BoolExpression {
                    op: guard.op,
                    lhs: guard.lhs.strip_spans(),
                    rhs: guard.rhs.strip_spans(),
                    span: Span::default(),
                },
                then_branch: then_branch.iter().map(Statement::strip_spans).collect(),
                else_branch: else_branch.iter().map(Statement::strip_spans).collect(),
                span: Span::default(),
            },
        }
    }
}

impl UnitExpression {
    pub fn strip_spans(&self) -> UnitExpression {
        let zero = Span::default();
        match self {
            UnitExpression::Var { name, .. } => UnitExpression::Var {
                name: name.clone(),
                span: zero,
            },
            UnitExpression::Add { lhs, rhs, .. } => UnitExpression::Add {
                lhs: Box::new(lhs.strip_spans()),
                rhs: Box::new(rhs.strip_spans()),
                span: zero,
            },
            UnitExpression::Sub { lhs, rhs, .. } => UnitExpression::Sub {
                lhs: Box::new(lhs.strip_spans()),
                rhs: Box::new(rhs.strip_spans()),
                span: zero,
            },
            UnitExpression::ScalarMul { scalar, value, .. } => UnitExpression::ScalarMul {
                scalar: scalar.clone(),
                value: Box::new(value.strip_spans()),
                span: zero,
            },
            UnitExpression::Mul { lhs, rhs, .. } => UnitExpression::Mul {
                lhs: Box::new(lhs.strip_spans()),
                rhs: Box::new(rhs.strip_spans()),
                span: zero,
            },
            UnitExpression::Div { lhs, rhs, .. } => UnitExpression::Div {
                lhs: Box::new(lhs.strip_spans()),
                rhs: Box::new(rhs.strip_spans()),
                span: zero,
            },
            UnitExpression::Call { function, args, .. } => UnitExpression::Call {
                function: function.clone(),
                args: args.iter().map(UnitExpression::strip_spans).collect(),
                span: zero,
            },
        }
    }
}
