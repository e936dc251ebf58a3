//! The dimensional-analysis pass.
//!
//! Declarations build an immutable environment from variables to resolved
//! units. Expressions compose dimensions bottom-up: addition and subtraction
//! demand homogeneous operands, multiplication and division sum or subtract
//! exponent vectors, scalar multiples are transparent, and calls check each
//! argument against its parameter's dimensions before yielding the declared
//! return dimensions.
//!
//! Compatibility is dimension equality, not unit identity: a yard-valued
//! expression assigns to a metre variable. When commensurable operands use
//! different scales the pass records an informational note carrying the
//! conversion factor; it never rewrites the program. Unlike the quantity
//! pass, this one collects every failure instead of stopping at the first.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::dims::{conversion_factor, dim_div, dim_mul, Dims, UnitError, UnitSpec, UnitTable};
use crate::quant_check::{FunEnv, QuantErrorKind};
use crate::rational::{format_rational, int, Rational};
use crate::syntax::ast::{Decl, Program, Span, Statement, UnitExpression};

/// Immutable mapping from declared variables to their resolved units.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DimEnv {
    specs: BTreeMap<String, UnitSpec>,
}

impl DimEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dims(&self, var: &str) -> Option<&Dims> {
        self.specs.get(var).map(|s| &s.dims)
    }

    pub fn spec(&self, var: &str) -> Option<&UnitSpec> {
        self.specs.get(var)
    }

    pub fn bind(&mut self, var: impl Into<String>, spec: UnitSpec) {
        self.specs.insert(var.into(), spec);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &UnitSpec)> {
        self.specs.iter()
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DimDiagKind {
    Mismatch {
        context: String,
        expected: Dims,
        found: Dims,
    },
    UnknownUnit {
        symbol: String,
    },
    BadUnit {
        message: String,
    },
    DuplicateDecl {
        var: String,
    },
    DuplicateFunction {
        name: String,
    },
    UnboundVariable {
        var: String,
    },
    UnknownFunction {
        name: String,
    },
    ArityMismatch {
        function: String,
        expected: usize,
        found: usize,
    },
    AffineOperand {
        context: String,
    },
    /// Informational: commensurable operands with different scales.
    ConversionNote {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimDiagnostic {
    pub loc: Span,
    pub kind: DimDiagKind,
}

impl DimDiagnostic {
    pub fn is_note(&self) -> bool {
        matches!(self.kind, DimDiagKind::ConversionNote { .. })
    }
}

impl fmt::Display for DimDiagKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimDiagKind::Mismatch {
                context,
                expected,
                found,
            } => write!(
                f,
                "dimension mismatch in {}: expected {}, found {}",
                context, expected, found
            ),
            DimDiagKind::UnknownUnit { symbol } => write!(f, "unknown unit symbol `{}`", symbol),
            DimDiagKind::BadUnit { message } => write!(f, "{}", message),
            DimDiagKind::DuplicateDecl { var } => write!(f, "variable `{}` declared twice", var),
            DimDiagKind::DuplicateFunction { name } => {
                write!(f, "function `{}` declared twice", name)
            }
            DimDiagKind::UnboundVariable { var } => write!(f, "unbound variable `{}`", var),
            DimDiagKind::UnknownFunction { name } => write!(
                f,
                "unknown function `{}` (functions may only call earlier declarations)",
                name
            ),
            DimDiagKind::ArityMismatch {
                function,
                expected,
                found,
            } => write!(
                f,
                "`{}` expects {} argument(s), found {}",
                function, expected, found
            ),
            DimDiagKind::AffineOperand { context } => {
                write!(f, "values in an affine unit cannot take part in {}", context)
            }
            DimDiagKind::ConversionNote { message } => write!(f, "{}", message),
        }
    }
}

impl fmt::Display for DimDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}",
            self.loc.start.line, self.loc.start.column, self.kind
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DimVerdict {
    Valid { notes: Vec<DimDiagnostic> },
    Fail { diagnostics: Vec<DimDiagnostic> },
}

impl DimVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, DimVerdict::Valid { .. })
    }

    pub fn diagnostics(&self) -> &[DimDiagnostic] {
        match self {
            DimVerdict::Valid { notes } => notes,
            DimVerdict::Fail { diagnostics } => diagnostics,
        }
    }
}

/// Folds declarations left to right into an environment; the first unknown
/// unit or duplicate variable is the error.
pub fn build_dim_env(decls: &[Decl], table: &UnitTable) -> Result<DimEnv, DimDiagnostic> {
    let mut diags = Vec::new();
    let env = build_env_collecting(decls, table, &mut diags);
    match diags.into_iter().find(|d| !d.is_note()) {
        Some(first) => Err(first),
        None => Ok(env),
    }
}

/// Infers the dimensions of an expression. Function signatures are resolved
/// against `table` on demand.
pub fn infer_dims(
    expr: &UnitExpression,
    env: &DimEnv,
    funs: &FunEnv,
    table: &UnitTable,
) -> Result<Dims, DimDiagnostic> {
    let mut checker = Checker::new(table, funs);
    let mut diags = Vec::new();
    checker.resolve_signatures(&mut diags);
    match checker.infer(expr, env, funs.len(), &mut diags) {
        Ok(attr) => Ok(attr.dims),
        Err(()) => Err(diags
            .into_iter()
            .find(|d| !d.is_note())
            .expect("failed inference records a diagnostic")),
    }
}

/// Checks a whole program, collecting every failure. Function bodies are
/// checked once, at their declaration, against the declared return unit.
pub fn check_dims_program(program: &Program, table: &UnitTable) -> DimVerdict {
    let mut diags = Vec::new();
    let funs = match FunEnv::build(program) {
        Ok(f) => f,
        Err(e) => {
            if let QuantErrorKind::DuplicateFunction { name } = e.kind {
                diags.push(DimDiagnostic {
                    loc: e.loc,
                    kind: DimDiagKind::DuplicateFunction { name },
                });
            }
            FunEnv::build_lenient(program)
        }
    };

    let env = build_env_collecting(&program.decls, table, &mut diags);
    let mut checker = Checker::new(table, &funs);
    checker.resolve_signatures(&mut diags);
    checker.check_function_bodies(&mut diags);
    checker.check_stmts(&program.stmts, &env, &mut diags);

    if diags.iter().any(|d| !d.is_note()) {
        DimVerdict::Fail { diagnostics: diags }
    } else {
        DimVerdict::Valid { notes: diags }
    }
}

fn build_env_collecting(
    decls: &[Decl],
    table: &UnitTable,
    diags: &mut Vec<DimDiagnostic>,
) -> DimEnv {
    let mut env = DimEnv::new();
    for decl in decls {
        let Decl::Var(d) = decl else { continue };
        if env.spec(&d.var).is_some() {
            diags.push(DimDiagnostic {
                loc: d.span,
                kind: DimDiagKind::DuplicateDecl { var: d.var.clone() },
            });
            continue;
        }
        match crate::dims::unit_to_spec(&d.unit, table) {
            Ok(spec) => env.bind(d.var.clone(), spec),
            Err(e) => diags.push(unit_error(d.unit_span, e)),
        }
    }
    env
}

fn unit_error(loc: Span, e: UnitError) -> DimDiagnostic {
    let kind = match e {
        UnitError::UnknownUnit(symbol) => DimDiagKind::UnknownUnit { symbol },
        other => DimDiagKind::BadUnit {
            message: other.to_string(),
        },
    };
    DimDiagnostic { loc, kind }
}

// ── internals ───────────────────────────────────────────────────────────

/// What inference knows about an expression: its dimensions, the composed
/// unit scale when every contributing unit agrees (`None` after mixing
/// differently scaled operands), and an affine offset for bare variables in
/// offset units.
struct Attr {
    dims: Dims,
    scale: Option<Rational>,
    offset: Rational,
}

impl Attr {
    fn of_spec(spec: &UnitSpec) -> Attr {
        Attr {
            dims: spec.dims.clone(),
            scale: Some(spec.factor.clone()),
            offset: spec.offset.clone(),
        }
    }

    /// Reconstructs a unit specification when the scale is known.
    fn as_spec(&self) -> Option<UnitSpec> {
        self.scale.as_ref().map(|scale| UnitSpec {
            dims: self.dims.clone(),
            factor: scale.clone(),
            offset: self.offset.clone(),
        })
    }
}

struct ResolvedSig {
    params: Vec<UnitSpec>,
    ret: UnitSpec,
}

struct Checker<'a, 'p> {
    table: &'a UnitTable,
    funs: &'a FunEnv<'p>,
    resolved: Vec<Option<ResolvedSig>>,
}

impl<'a, 'p> Checker<'a, 'p> {
    fn new(table: &'a UnitTable, funs: &'a FunEnv<'p>) -> Self {
        Checker {
            table,
            funs,
            resolved: Vec::new(),
        }
    }

    fn resolve_signatures(&mut self, diags: &mut Vec<DimDiagnostic>) {
        for f in self.funs.iter() {
            let mut params = Vec::with_capacity(f.params.len());
            let mut ok = true;
            for p in &f.params {
                match crate::dims::unit_to_spec(&p.unit, self.table) {
                    Ok(spec) => params.push(spec),
                    Err(e) => {
                        diags.push(unit_error(p.unit_span, e));
                        ok = false;
                    }
                }
            }
            let ret = match crate::dims::unit_to_spec(&f.return_unit, self.table) {
                Ok(spec) => Some(spec),
                Err(e) => {
                    diags.push(unit_error(f.return_unit_span, e));
                    ok = false;
                    None
                }
            };
            self.resolved.push(match (ok, ret) {
                (true, Some(ret)) => Some(ResolvedSig { params, ret }),
                _ => None,
            });
        }
    }

    fn check_function_bodies(&self, diags: &mut Vec<DimDiagnostic>) {
        for (index, f) in self.funs.iter().enumerate() {
            let Some(sig) = &self.resolved[index] else {
                continue;
            };
            let mut local = DimEnv::new();
            for (p, spec) in f.params.iter().zip(&sig.params) {
                local.bind(p.name.clone(), spec.clone());
            }
            let ret = sig.ret.clone();
            let Ok(attr) = self.infer(&f.body, &local, index, diags) else {
                continue;
            };
            if attr.dims != ret.dims {
                diags.push(DimDiagnostic {
                    loc: f.body.span(),
                    kind: DimDiagKind::Mismatch {
                        context: format!("the body of `{}` against its declared return", f.name),
                        expected: ret.dims.clone(),
                        found: attr.dims,
                    },
                });
            } else {
                self.scale_note(
                    &attr,
                    &ret,
                    f.body.span(),
                    &format!(
                        "the body of `{}` is commensurable with its declared return but differently scaled",
                        f.name
                    ),
                    diags,
                );
            }
        }
    }

    fn check_stmts(&self, stmts: &[Statement], env: &DimEnv, diags: &mut Vec<DimDiagnostic>) {
        for stmt in stmts {
            match stmt {
                Statement::Assign {
                    var,
                    var_span,
                    value,
                    ..
                } => {
                    let lhs = match env.spec(var) {
                        Some(spec) => spec.clone(),
                        None => {
                            diags.push(DimDiagnostic {
                                loc: *var_span,
                                kind: DimDiagKind::UnboundVariable { var: var.clone() },
                            });
                            // Still analyse the right-hand side for errors.
                            let _ = self.infer(value, env, self.funs.len(), diags);
                            continue;
                        }
                    };
                    let Ok(attr) = self.infer(value, env, self.funs.len(), diags) else {
                        continue;
                    };
                    if attr.dims != lhs.dims {
                        diags.push(DimDiagnostic {
                            loc: value.span(),
                            kind: DimDiagKind::Mismatch {
                                context: format!("the assignment to `{}`", var),
                                expected: lhs.dims.clone(),
                                found: attr.dims,
                            },
                        });
                    } else {
                        self.scale_note(
                            &attr,
                            &lhs,
                            value.span(),
                            &format!(
                                "the value assigned to `{}` is commensurable but differently scaled",
                                var
                            ),
                            diags,
                        );
                    }
                }
                Statement::If {
                    guard,
                    then_branch,
                    else_branch,
                    ..
                } => {
                    let left = self.infer(&guard.lhs, env, self.funs.len(), diags);
                    let right = self.infer(&guard.rhs, env, self.funs.len(), diags);
                    if let (Ok(l), Ok(r)) = (left, right) {
                        if l.dims != r.dims {
                            diags.push(DimDiagnostic {
                                loc: guard.span,
                                kind: DimDiagKind::Mismatch {
                                    context: "the comparison operands".to_string(),
                                    expected: l.dims,
                                    found: r.dims,
                                },
                            });
                        } else if let Some(spec) = l.as_spec() {
                            self.scale_note(
                                &r,
                                &spec,
                                guard.span,
                                "the comparison operands are commensurable but differently scaled",
                                diags,
                            );
                        }
                    }
                    self.check_stmts(then_branch, env, diags);
                    self.check_stmts(else_branch, env, diags);
                }
            }
        }
    }

    /// Emits an informational note when `attr` is commensurable with
    /// `target` but needs a non-identity conversion. `clause` is a complete
    /// leading phrase, e.g. "the operands are commensurable but ...".
    fn scale_note(
        &self,
        attr: &Attr,
        target: &UnitSpec,
        loc: Span,
        clause: &str,
        diags: &mut Vec<DimDiagnostic>,
    ) {
        let Some(spec) = attr.as_spec() else { return };
        let Ok(conv) = conversion_factor(&spec, target) else {
            return;
        };
        if !conv.is_identity() {
            diags.push(DimDiagnostic {
                loc,
                kind: DimDiagKind::ConversionNote {
                    message: format!("{}; conversion {} applies", clause, conv),
                },
            });
        }
    }

    fn infer(
        &self,
        expr: &UnitExpression,
        env: &DimEnv,
        visible: usize,
        diags: &mut Vec<DimDiagnostic>,
    ) -> Result<Attr, ()> {
        match expr {
            UnitExpression::Var { name, span } => match env.spec(name) {
                Some(spec) => Ok(Attr::of_spec(spec)),
                None => {
                    diags.push(DimDiagnostic {
                        loc: *span,
                        kind: DimDiagKind::UnboundVariable { var: name.clone() },
                    });
                    Err(())
                }
            },
            UnitExpression::Add { lhs, rhs, span } | UnitExpression::Sub { lhs, rhs, span } => {
                let symbol = if matches!(expr, UnitExpression::Add { .. }) {
                    "+"
                } else {
                    "-"
                };
                let l = self.infer(lhs, env, visible, diags);
                let r = self.infer(rhs, env, visible, diags);
                let (l, r) = (l?, r?);
                self.reject_affine(&l, lhs.span(), "addition", diags)?;
                self.reject_affine(&r, rhs.span(), "addition", diags)?;
                if l.dims != r.dims {
                    diags.push(DimDiagnostic {
                        loc: *span,
                        kind: DimDiagKind::Mismatch {
                            context: format!("the operands of `{}`", symbol),
                            expected: l.dims,
                            found: r.dims,
                        },
                    });
                    return Err(());
                }
                let scale = match (&l.scale, &r.scale) {
                    (Some(a), Some(b)) if a == b => Some(a.clone()),
                    (Some(a), Some(b)) => {
                        diags.push(DimDiagnostic {
                            loc: *span,
                            kind: DimDiagKind::ConversionNote {
                                message: format!(
                                    "the operands of `{}` are commensurable but differently scaled; conversion {} applies",
                                    symbol,
                                    format_rational(&(b / a)),
                                ),
                            },
                        });
                        None
                    }
                    _ => None,
                };
                Ok(Attr {
                    dims: l.dims,
                    scale,
                    offset: int(0),
                })
            }
            UnitExpression::ScalarMul { value, .. } => {
                let inner = self.infer(value, env, visible, diags)?;
                self.reject_affine(&inner, value.span(), "scalar multiplication", diags)?;
                Ok(inner)
            }
            UnitExpression::Mul { lhs, rhs, span: _ }
            | UnitExpression::Div { lhs, rhs, span: _ } => {
                let dividing = matches!(expr, UnitExpression::Div { .. });
                let l = self.infer(lhs, env, visible, diags);
                let r = self.infer(rhs, env, visible, diags);
                let (l, r) = (l?, r?);
                self.reject_affine(&l, lhs.span(), "multiplication", diags)?;
                self.reject_affine(&r, rhs.span(), "multiplication", diags)?;
                let dims = if dividing {
                    dim_div(&l.dims, &r.dims)
                } else {
                    dim_mul(&l.dims, &r.dims)
                };
                let scale = match (&l.scale, &r.scale) {
                    (Some(a), Some(b)) => Some(if dividing { a / b } else { a * b }),
                    _ => None,
                };
                Ok(Attr {
                    dims,
                    scale,
                    offset: int(0),
                })
            }
            UnitExpression::Call {
                function,
                args,
                span,
            } => {
                let target = self
                    .funs
                    .lookup(function)
                    .filter(|(index, _)| *index < visible);
                let Some((index, decl)) = target else {
                    diags.push(DimDiagnostic {
                        loc: *span,
                        kind: DimDiagKind::UnknownFunction {
                            name: function.clone(),
                        },
                    });
                    return Err(());
                };
                if args.len() != decl.params.len() {
                    diags.push(DimDiagnostic {
                        loc: *span,
                        kind: DimDiagKind::ArityMismatch {
                            function: function.clone(),
                            expected: decl.params.len(),
                            found: args.len(),
                        },
                    });
                    return Err(());
                }
                // An unresolved signature already produced diagnostics at
                // the declaration; just analyse the arguments.
                let mut failed = self.resolved[index].is_none();
                for (position, arg) in args.iter().enumerate() {
                    let Ok(attr) = self.infer(arg, env, visible, diags) else {
                        failed = true;
                        continue;
                    };
                    let Some(sig) = &self.resolved[index] else {
                        continue;
                    };
                    let param_spec = &sig.params[position];
                    if attr.dims != param_spec.dims {
                        diags.push(DimDiagnostic {
                            loc: arg.span(),
                            kind: DimDiagKind::Mismatch {
                                context: format!(
                                    "the argument for parameter `{}` of `{}`",
                                    decl.params[position].name, function
                                ),
                                expected: param_spec.dims.clone(),
                                found: attr.dims,
                            },
                        });
                        failed = true;
                    } else {
                        self.scale_note(
                            &attr,
                            param_spec,
                            arg.span(),
                            &format!(
                                "the argument is commensurable with parameter `{}` of `{}` but differently scaled",
                                decl.params[position].name, function
                            ),
                            diags,
                        );
                    }
                }
                if failed {
                    return Err(());
                }
                let sig = self.resolved[index].as_ref().expect("checked above");
                Ok(Attr::of_spec(&sig.ret))
            }
        }
    }

    fn reject_affine(
        &self,
        attr: &Attr,
        loc: Span,
        context: &str,
        diags: &mut Vec<DimDiagnostic>,
    ) -> Result<(), ()> {
        if attr.offset.is_zero() {
            Ok(())
        } else {
            diags.push(DimDiagnostic {
                loc,
                kind: DimDiagKind::AffineOperand {
                    context: context.to_string(),
                },
            });
            Err(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn d(l: i64, m: i64, t: i64) -> Dims {
        Dims::from_ints(l, m, t)
    }

    fn setup(src: &str) -> (Program, UnitTable) {
        (parse(src).unwrap(), UnitTable::standard())
    }

    use crate::syntax::ast::Program;

    #[test]
    fn declarations_resolve_to_dimension_vectors() {
        let (p, table) = setup("begin t : float of N*m; v : float of m*s^-1 in end");
        let env = build_dim_env(&p.decls, &table).unwrap();
        assert_eq!(env.dims("t"), Some(&d(2, 1, -2)));
        assert_eq!(env.dims("v"), Some(&d(1, 0, -1)));
        assert_eq!(env.len(), 2);

        let empty = build_dim_env(&[], &table).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn unknown_units_surface_with_their_location() {
        let (p, table) = setup("begin z : float of parsec in end");
        let err = build_dim_env(&p.decls, &table).unwrap_err();
        assert!(matches!(err.kind, DimDiagKind::UnknownUnit { ref symbol } if symbol == "parsec"));
        assert_eq!(err.loc.start.line, 1);
    }

    #[test]
    fn expression_dimensions() {
        let (p, table) = setup(
            "begin t1 : float of N*m; v : float of m*s^-1; i : float of kg*m^2; t : float of s in t1 := 2 * t1; t1 := i / (t * t) end",
        );
        let env = build_dim_env(&p.decls, &table).unwrap();
        let funs = FunEnv::build(&p).unwrap();

        let exprs: Vec<&UnitExpression> = p
            .stmts
            .iter()
            .map(|s| match s {
                Statement::Assign { value, .. } => value,
                _ => panic!(),
            })
            .collect();
        assert_eq!(
            infer_dims(exprs[0], &env, &funs, &table).unwrap(),
            d(2, 1, -2)
        );
        assert_eq!(
            infer_dims(exprs[1], &env, &funs, &table).unwrap(),
            d(2, 1, -2)
        );
    }

    #[test]
    fn heterogeneous_addition_is_reported() {
        let (p, table) = setup("begin t1 : float of N*m; v : float of m*s^-1 in t1 := t1 + v end");
        let verdict = check_dims_program(&p, &table);
        match &verdict {
            DimVerdict::Fail { diagnostics } => {
                assert!(matches!(
                    diagnostics[0].kind,
                    DimDiagKind::Mismatch { ref expected, ref found, .. }
                        if *expected == d(2, 1, -2) && *found == d(1, 0, -1)
                ));
            }
            other => panic!("expected failure, got {:?}", other),
        }
    }

    #[test]
    fn kinetic_energy_shape_is_valid() {
        let (p, table) = setup(
            "begin e : float of J named T; i : float of kg * m^2 named MI; t : float of s named S in e := 0.5 * i / (t * t) end",
        );
        assert!(check_dims_program(&p, &table).is_valid());
    }

    #[test]
    fn assigning_velocity_to_torque_fails() {
        let (p, table) = setup("begin t : float of N*m; v : float of m*s^-1 in t := 2 * v end");
        assert!(!check_dims_program(&p, &table).is_valid());
    }

    #[test]
    fn both_branches_must_be_valid() {
        let (p, table) = setup(
            "begin t : float of N*m; v : float of m*s^-1 in if t < t then t := t else t := v end end",
        );
        let verdict = check_dims_program(&p, &table);
        assert!(!verdict.is_valid());
        // Guards must compare like with like.
        let (p, table) =
            setup("begin t : float of N*m; v : float of m*s^-1 in if t < v then else end end");
        assert!(!check_dims_program(&p, &table).is_valid());
    }

    #[test]
    fn commensurable_units_pass_with_a_note() {
        let (p, table) = setup("begin lm : float of m; ly : float of yard in lm := ly end");
        match check_dims_program(&p, &table) {
            DimVerdict::Valid { notes } => {
                assert_eq!(notes.len(), 1);
                match &notes[0].kind {
                    DimDiagKind::ConversionNote { message } => {
                        assert!(message.contains("1143/1250"), "message: {}", message)
                    }
                    other => panic!("expected conversion note, got {:?}", other),
                }
            }
            other => panic!("expected valid, got {:?}", other),
        }
    }

    #[test]
    fn mixed_scale_addition_notes_once() {
        let (p, table) = setup(
            "begin total : float of m; a : float of m; b : float of foot in total := a + b end",
        );
        match check_dims_program(&p, &table) {
            DimVerdict::Valid { notes } => assert_eq!(notes.len(), 1),
            other => panic!("expected valid, got {:?}", other),
        }
    }

    #[test]
    fn function_bodies_check_against_their_return() {
        let (p, table) = setup(
            "begin x : float of J; fun broken (a : m named L) : J named E is a + a in x := broken(x) end",
        );
        let verdict = check_dims_program(&p, &table);
        match &verdict {
            DimVerdict::Fail { diagnostics } => {
                // Body mismatch plus the argument mismatch at the call.
                assert!(diagnostics
                    .iter()
                    .any(|di| matches!(&di.kind, DimDiagKind::Mismatch { context, .. } if context.contains("broken"))));
            }
            other => panic!("expected failure, got {:?}", other),
        }
    }

    #[test]
    fn calls_check_arity_and_argument_dimensions() {
        let (p, table) = setup(
            "begin x : float of m; t : float of s; fun id (a : m named L) : m named L is a in x := id(x, x); x := id(t) end",
        );
        let verdict = check_dims_program(&p, &table);
        let DimVerdict::Fail { diagnostics } = &verdict else {
            panic!("expected failure");
        };
        assert!(diagnostics
            .iter()
            .any(|di| matches!(di.kind, DimDiagKind::ArityMismatch { .. })));
        assert!(diagnostics
            .iter()
            .any(|di| matches!(&di.kind, DimDiagKind::Mismatch { context, .. } if context.contains("parameter"))));
    }

    #[test]
    fn all_failures_are_collected() {
        let (p, table) = setup(
            "begin t : float of N*m; v : float of m*s^-1 in t := v; v := t; t := nowhere end",
        );
        let DimVerdict::Fail { diagnostics } = check_dims_program(&p, &table) else {
            panic!("expected failure");
        };
        assert!(diagnostics.len() >= 3, "got {:?}", diagnostics);
    }

    #[test]
    fn environment_is_immutable_across_checking() {
        let (p, table) = setup(
            "begin a : float of m; b : float of m named L in if a < b then a := b else b := a end end",
        );
        let env = build_dim_env(&p.decls, &table).unwrap();
        let before = env.clone();
        let _ = check_dims_program(&p, &table);
        assert_eq!(env, before);
    }

    #[test]
    fn inference_matches_a_bottom_up_oracle_over_enumerated_trees() {
        use crate::rational::Rational;
        use crate::syntax::ast::Span;

        // Independent evaluation: raw rational triples, no `Dims` machinery.
        type Triple = [Rational; 3];
        fn eval(e: &UnitExpression, env: &[(&str, Triple)]) -> Option<Triple> {
            match e {
                UnitExpression::Var { name, .. } => {
                    env.iter().find(|(v, _)| v == name).map(|(_, t)| t.clone())
                }
                UnitExpression::Add { lhs, rhs, .. } | UnitExpression::Sub { lhs, rhs, .. } => {
                    let l = eval(lhs, env)?;
                    let r = eval(rhs, env)?;
                    (l == r).then_some(l)
                }
                UnitExpression::ScalarMul { value, .. } => eval(value, env),
                UnitExpression::Mul { lhs, rhs, .. } => {
                    let l = eval(lhs, env)?;
                    let r = eval(rhs, env)?;
                    Some([&l[0] + &r[0], &l[1] + &r[1], &l[2] + &r[2]])
                }
                UnitExpression::Div { lhs, rhs, .. } => {
                    let l = eval(lhs, env)?;
                    let r = eval(rhs, env)?;
                    Some([&l[0] - &r[0], &l[1] - &r[1], &l[2] - &r[2]])
                }
                UnitExpression::Call { .. } => unreachable!("no calls in this enumeration"),
            }
        }

        fn var(name: &str) -> UnitExpression {
            UnitExpression::Var {
                name: name.to_string(),
                span: Span::default(),
            }
        }
        fn binary(op: usize, a: &UnitExpression, b: &UnitExpression) -> UnitExpression {
            let (lhs, rhs, span) = (Box::new(a.clone()), Box::new(b.clone()), Span::default());
            match op {
                0 => UnitExpression::Add { lhs, rhs, span },
                1 => UnitExpression::Sub { lhs, rhs, span },
                2 => UnitExpression::Mul { lhs, rhs, span },
                _ => UnitExpression::Div { lhs, rhs, span },
            }
        }
        fn scalar(x: &UnitExpression) -> UnitExpression {
            UnitExpression::ScalarMul {
                scalar: crate::rational::ratio(1, 2),
                value: Box::new(x.clone()),
                span: Span::default(),
            }
        }

        let (p, table) =
            setup("begin a : float of m * s^-1; b : float of kg; c : float of J in end");
        let env = build_dim_env(&p.decls, &table).unwrap();
        let funs = FunEnv::build(&p).unwrap();
        let r = |n: i64| crate::rational::int(n);
        let triples: [(&str, Triple); 3] = [
            ("a", [r(1), r(0), r(-1)]),
            ("b", [r(0), r(1), r(0)]),
            ("c", [r(2), r(1), r(-2)]),
        ];

        let check = |e: &UnitExpression| {
            let expected = eval(e, &triples);
            let got = infer_dims(e, &env, &funs, &table);
            match (expected, got) {
                (Some(t), Ok(dims)) => assert_eq!(dims.exponents(), &t[..]),
                (None, Err(_)) => {}
                (expected, got) => {
                    panic!("oracle {:?} disagrees with {:?} on {:?}", expected, got, e)
                }
            }
        };

        // Exhaustive to three levels, then a seeded sample one level deeper.
        let leaves: Vec<UnitExpression> = triples.iter().map(|(v, _)| var(v)).collect();
        let grow = |level: &[UnitExpression]| {
            let mut next = leaves.clone();
            for x in level {
                next.push(scalar(x));
            }
            for op in 0..4 {
                for a in level {
                    for b in level {
                        next.push(binary(op, a, b));
                    }
                }
            }
            next
        };
        let h2 = grow(&leaves);
        let h3 = grow(&h2);
        assert_eq!(h3.len(), 3 + h2.len() + 4 * h2.len() * h2.len());
        for tree in &h3 {
            check(tree);
        }
        let mut state: u64 = 0x0123_4567_89AB_CDEF;
        let mut next_index = |len: usize| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) as usize) % len
        };
        for _ in 0..20_000 {
            let op = next_index(4);
            let a = &h3[next_index(h3.len())];
            let b = &h3[next_index(h3.len())];
            check(&binary(op, a, b));
        }
    }

    #[test]
    fn affine_variables_assign_but_do_not_compose() {
        let mut table = UnitTable::standard();
        table.load_overlay("marked = m offset 5").unwrap();
        let p = parse("begin a : float of marked; b : float of m in b := a end").unwrap();
        match check_dims_program(&p, &table) {
            DimVerdict::Valid { notes } => assert_eq!(notes.len(), 1),
            other => panic!("expected valid, got {:?}", other),
        }

        let p = parse("begin a : float of marked; b : float of m in b := a + a end").unwrap();
        let DimVerdict::Fail { diagnostics } = check_dims_program(&p, &table) else {
            panic!("expected failure");
        };
        assert!(diagnostics
            .iter()
            .any(|di| matches!(di.kind, DimDiagKind::AffineOperand { .. })));
    }
}
