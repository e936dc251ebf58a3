//! Discipline lint: general multiplication belongs inside functions that
//! declare a named return quantity.
//!
//! Multiplication erases quantity names, so a product computed in the main
//! block leaves the checker unable to tell a correctly derived quantity from
//! a dimensionally plausible accident. The lint flags each multiplicative
//! region outside a named-return function body (`DISC-MUL`) and every
//! assignment that writes a nameless value into a named variable
//! (`DISC-NONAME-ASSIGN`). Scalar multiples are exempt: they preserve the
//! quantity name.
//!
//! Linting is pure reporting: it never fails and never changes verdicts.
//! A warning is suppressed by `-- quantlint: allow <RULE>` on the preceding
//! line.

use std::fmt;

use crate::quant_check::{check_assignment, infer_quant, FunEnv};
use crate::quantity::{QuantEnv, QuantName};
use crate::syntax::ast::{Decl, Program, Span, Statement, UnitExpression};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LintRule {
    DiscMul,
    DiscNonameAssign,
}

impl LintRule {
    pub fn id(self) -> &'static str {
        match self {
            LintRule::DiscMul => "DISC-MUL",
            LintRule::DiscNonameAssign => "DISC-NONAME-ASSIGN",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LintSeverity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LintWarning {
    pub loc: Span,
    pub rule: LintRule,
    pub message: String,
    pub severity: LintSeverity,
}

impl fmt::Display for LintWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {} {}",
            self.loc.start.line,
            self.loc.start.column,
            self.rule.id(),
            self.message
        )
    }
}

pub fn lint_discipline(program: &Program) -> Vec<LintWarning> {
    let funs = FunEnv::build_lenient(program);
    let mut warnings = Vec::new();

    // Multiplication inside a function body is fine exactly when the body's
    // declared return carries a name.
    for decl in &program.decls {
        if let Decl::Fun(f) = decl {
            if !f.return_quant.is_named() {
                flag_multiplications(&f.body, false, &mut warnings);
            }
        }
    }

    let mut env = crate::quant_check::initial_quant_env(program);
    lint_stmts(&program.stmts, &mut env, &funs, &mut warnings);

    warnings.retain(|w| !suppressed(program, w));
    warnings
}

fn lint_stmts(
    stmts: &[Statement],
    env: &mut QuantEnv,
    funs: &FunEnv,
    warnings: &mut Vec<LintWarning>,
) {
    for stmt in stmts {
        match stmt {
            Statement::Assign {
                var, value, span, ..
            } => {
                flag_multiplications(value, false, warnings);
                let target_named = env.get(var).is_some_and(QuantName::is_named);
                if target_named {
                    if let Ok(QuantName::Noname) = infer_quant(value, env, funs) {
                        warnings.push(LintWarning {
                            loc: *span,
                            rule: LintRule::DiscNonameAssign,
                            message: format!(
                                "`{}` is a named quantity but the assigned expression has no name; wrap the computation in a function with a named return",
                                var
                            ),
                            severity: LintSeverity::Warning,
                        });
                    }
                }
                // Thread promotions so later judgements see them; checker
                // failures leave the environment as it was.
                if let Ok(next) = check_assignment(var, *span, value, env, funs) {
                    *env = next;
                }
            }
            Statement::If {
                guard,
                then_branch,
                else_branch,
                ..
            } => {
                flag_multiplications(&guard.lhs, false, warnings);
                flag_multiplications(&guard.rhs, false, warnings);
                lint_stmts(then_branch, env, funs, warnings);
                lint_stmts(else_branch, env, funs, warnings);
            }
        }
    }
}

/// Warns once per multiplicative region: the topmost `*` or `/` of a chain.
/// Scalar multiples are exempt and do not extend a region, so the product
/// inside `2 * (a * b)` is still flagged.
fn flag_multiplications(expr: &UnitExpression, in_region: bool, warnings: &mut Vec<LintWarning>) {
    match expr {
        UnitExpression::Mul { lhs, rhs, span } | UnitExpression::Div { lhs, rhs, span } => {
            if !in_region {
                warnings.push(LintWarning {
                    loc: *span,
                    rule: LintRule::DiscMul,
                    message: "general multiplication outside a named-return function loses the quantity name".to_string(),
                    severity: LintSeverity::Warning,
                });
            }
            flag_multiplications(lhs, true, warnings);
            flag_multiplications(rhs, true, warnings);
        }
        UnitExpression::Add { lhs, rhs, .. } | UnitExpression::Sub { lhs, rhs, .. } => {
            flag_multiplications(lhs, false, warnings);
            flag_multiplications(rhs, false, warnings);
        }
        UnitExpression::ScalarMul { value, .. } => {
            flag_multiplications(value, false, warnings);
        }
        UnitExpression::Call { args, .. } => {
            for arg in args {
                flag_multiplications(arg, false, warnings);
            }
        }
        UnitExpression::Var { .. } => {}
    }
}

fn suppressed(program: &Program, warning: &LintWarning) -> bool {
    let line = warning.loc.start.line;
    program
        .suppressions
        .iter()
        .any(|s| s.line + 1 == line && s.rules.iter().any(|r| r == warning.rule.id()))
}
