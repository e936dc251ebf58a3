//! The named-quantity pass.
//!
//! Expressions are inferred against the quantity environment: variables look
//! up their binding, addition goes through [`diamond`], multiplication
//! through [`triangle`], and scalar multiples are transparent. Statement
//! checking threads the environment: each statement's output environment
//! feeds the next, and the then branch's output feeds the else branch.
//!
//! Function invocation binds each argument's quantity to its parameter with
//! the assignment operator against an empty environment (collecting the
//! promotions), re-infers the body under the parameter bindings plus those
//! promotions, and finally joins the declared return quantity with the
//! body's via `diamond`, so a `Noname` body is cast upward to the declared
//! name. Signatures using quantity variables are resolved per call site by
//! union-find unification before that flow runs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::quantity::{
    assign_op, diamond, triangle, AlgebraError, AssignFailCode, AssignResult, QuantEnv, QuantName,
};
use crate::syntax::ast::{Decl, FunctionDecl, Program, Span, Statement, UnitExpression};

/// Function environment: declarations in order, keyed by name. A function
/// body may only call functions declared earlier, and never itself.
#[derive(Debug, Clone)]
pub struct FunEnv<'a> {
    funcs: Vec<&'a FunctionDecl>,
    by_name: HashMap<&'a str, usize>,
}

impl<'a> FunEnv<'a> {
    pub fn build(program: &'a Program) -> Result<Self, QuantError> {
        let mut env = FunEnv {
            funcs: Vec::new(),
            by_name: HashMap::new(),
        };
        for decl in &program.decls {
            if let Decl::Fun(f) = decl {
                if env.by_name.contains_key(f.name.as_str()) {
                    return Err(QuantError {
                        loc: f.span,
                        kind: QuantErrorKind::DuplicateFunction {
                            name: f.name.clone(),
                        },
                    });
                }
                env.by_name.insert(&f.name, env.funcs.len());
                env.funcs.push(f);
            }
        }
        Ok(env)
    }

    /// First-definition-wins variant for best-effort passes.
    pub fn build_lenient(program: &'a Program) -> Self {
        let mut env = FunEnv {
            funcs: Vec::new(),
            by_name: HashMap::new(),
        };
        for decl in &program.decls {
            if let Decl::Fun(f) = decl {
                if !env.by_name.contains_key(f.name.as_str()) {
                    env.by_name.insert(&f.name, env.funcs.len());
                    env.funcs.push(f);
                }
            }
        }
        env
    }

    pub fn lookup(&self, name: &str) -> Option<(usize, &'a FunctionDecl)> {
        self.by_name.get(name).map(|&i| (i, self.funcs[i]))
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a FunctionDecl> + '_ {
        self.funcs.iter().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantErrorKind {
    #[error("cannot add {left} to {right}: the operands do not represent the same entity")]
    AdditionMismatch { left: QuantName, right: QuantName },
    #[error("cannot assign {value} to `{var}`, which holds {bound}")]
    AssignMismatch {
        var: String,
        bound: QuantName,
        value: QuantName,
    },
    #[error("argument for parameter `{param}` of `{function}` must be {expected}, found {found}")]
    ArgumentMismatch {
        function: String,
        param: String,
        expected: QuantName,
        found: QuantName,
    },
    #[error("body of `{function}` yields {found}, but the declaration promises {declared}")]
    ReturnMismatch {
        function: String,
        declared: QuantName,
        found: QuantName,
    },
    #[error("quantity variable `?{quantvar}` of `{function}` cannot unify {first} with {second}")]
    UnifyConflict {
        function: String,
        quantvar: String,
        first: QuantName,
        second: QuantName,
    },
    #[error("variable `{var}` is not bound in the quantity environment")]
    UnboundVariable { var: String },
    #[error("unknown function `{name}` (functions may only call earlier declarations)")]
    UnknownFunction { name: String },
    #[error("`{function}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        function: String,
        expected: usize,
        found: usize,
    },
    #[error("function `{name}` declared twice")]
    DuplicateFunction { name: String },
    #[error("internal: {message}")]
    Internal { message: String },
    #[error("the then branch promoted `{var}` to {promoted}, which the else branch contradicts")]
    BranchNote { var: String, promoted: QuantName },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantError {
    pub loc: Span,
    pub kind: QuantErrorKind,
}

impl QuantError {
    pub fn is_note(&self) -> bool {
        matches!(self.kind, QuantErrorKind::BranchNote { .. })
    }
}

impl fmt::Display for QuantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}",
            self.loc.start.line, self.loc.start.column, self.kind
        )
    }
}

impl std::error::Error for QuantError {}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantVerdict {
    Succeed(QuantEnv),
    Fail(Vec<QuantError>),
}

impl QuantVerdict {
    pub fn is_succeed(&self) -> bool {
        matches!(self, QuantVerdict::Succeed(_))
    }
}

/// The initial environment: every declared variable bound to its annotation.
pub fn initial_quant_env(program: &Program) -> QuantEnv {
    let mut env = QuantEnv::new();
    for decl in &program.decls {
        if let Decl::Var(d) = decl {
            env.bind(d.var.clone(), d.quant.clone());
        }
    }
    env
}

/// Infers the quantity of an expression under `env`.
pub fn infer_quant(
    expr: &UnitExpression,
    env: &QuantEnv,
    funs: &FunEnv,
) -> Result<QuantName, QuantError> {
    Ctx { funs }.infer(expr, env, funs.len())
}

/// Invokes `function` on `args` inferred under the caller's environment.
pub fn invoke_function(
    function: &str,
    args: &[UnitExpression],
    env: &QuantEnv,
    funs: &FunEnv,
) -> Result<QuantName, QuantError> {
    let ctx = Ctx { funs };
    let span = args
        .first()
        .map(|a| a.span().to(args[args.len() - 1].span()))
        .unwrap_or_default();
    let (index, decl) = funs.lookup(function).ok_or_else(|| QuantError {
        loc: span,
        kind: QuantErrorKind::UnknownFunction {
            name: function.to_string(),
        },
    })?;
    ctx.invoke(index, decl, span, args, env, funs.len())
}

/// Checks `var := value`, returning the possibly promoted environment.
pub fn check_assignment(
    var: &str,
    span: Span,
    value: &UnitExpression,
    env: &QuantEnv,
    funs: &FunEnv,
) -> Result<QuantEnv, QuantError> {
    Ctx { funs }.assign(var, span, value, env, funs.len())
}

/// Threads the environment through a statement list; stops at the first
/// failing statement.
pub fn check_quant_stmts(stmts: &[Statement], env: &QuantEnv, funs: &FunEnv) -> QuantVerdict {
    match (Ctx { funs }).thread(stmts, env.clone()) {
        Ok(out) => QuantVerdict::Succeed(out),
        Err(errors) => QuantVerdict::Fail(errors),
    }
}

/// Resolves the quantity variables of a signature against the quantities of
/// the call's arguments. Parameters sharing a variable form union-find
/// classes (representative: lowest parameter index); each class must unify
/// to at most one name, and unifies to `Noname` when it never meets one.
pub fn unify_quantvars(
    decl: &FunctionDecl,
    argnames: &[(QuantName, Span)],
) -> Result<BTreeMap<String, QuantName>, QuantError> {
    debug_assert_eq!(decl.params.len(), argnames.len());
    let mut uf = UnionFind::new(decl.params.len());
    let mut first_index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, param) in decl.params.iter().enumerate() {
        if let QuantName::Quantvar(q) = &param.quant {
            match first_index.get(q.as_str()) {
                Some(&j) => uf.union(j, i),
                None => {
                    first_index.insert(q, i);
                }
            }
        }
    }

    let mut class_name: BTreeMap<usize, QuantName> = BTreeMap::new();
    for (i, param) in decl.params.iter().enumerate() {
        let QuantName::Quantvar(q) = &param.quant else {
            continue;
        };
        let (arg, span) = &argnames[i];
        let root = uf.find(i);
        let current = class_name.entry(root).or_insert(QuantName::Noname);
        match diamond(current, arg) {
            Ok(joined) => *current = joined,
            Err(AlgebraError::Mismatch { left, right }) => {
                return Err(QuantError {
                    loc: *span,
                    kind: QuantErrorKind::UnifyConflict {
                        function: decl.name.clone(),
                        quantvar: q.clone(),
                        first: left,
                        second: right,
                    },
                });
            }
            Err(AlgebraError::UnresolvedQuantvar(v)) => {
                return Err(QuantError {
                    loc: *span,
                    kind: QuantErrorKind::Internal {
                        message: format!("argument inferred to quantity variable {}", v),
                    },
                });
            }
        }
    }

    let mut subst = BTreeMap::new();
    for (q, &i) in &first_index {
        let root = uf.find(i);
        let name = class_name.get(&root).cloned().unwrap_or(QuantName::Noname);
        subst.insert(q.to_string(), name);
    }
    Ok(subst)
}

/// Checks the whole program: builds the function environment, checks each
/// function body once at its declaration against the declared return
/// quantity (generic signatures are deferred to their call sites), then
/// threads the statements.
pub fn check_quant_program(program: &Program) -> QuantVerdict {
    let funs = match FunEnv::build(program) {
        Ok(f) => f,
        Err(e) => return QuantVerdict::Fail(vec![e]),
    };
    let ctx = Ctx { funs: &funs };

    for (index, f) in funs.funcs.iter().enumerate() {
        if f.has_quantvars() {
            continue;
        }
        let mut local = QuantEnv::new();
        for p in &f.params {
            local.bind(p.name.clone(), p.quant.clone());
        }
        let body_name = match ctx.infer(&f.body, &local, index) {
            Ok(n) => n,
            Err(e) => return QuantVerdict::Fail(vec![e]),
        };
        if let Err(e) = diamond(&f.return_quant, &body_name) {
            let kind = match e {
                AlgebraError::Mismatch { .. } => QuantErrorKind::ReturnMismatch {
                    function: f.name.clone(),
                    declared: f.return_quant.clone(),
                    found: body_name,
                },
                AlgebraError::UnresolvedQuantvar(v) => QuantErrorKind::Internal {
                    message: format!("quantity variable {} survived declaration checking", v),
                },
            };
            return QuantVerdict::Fail(vec![QuantError {
                loc: f.body.span(),
                kind,
            }]);
        }
    }

    let initial = initial_quant_env(program);
    match ctx.thread(&program.stmts, initial) {
        Ok(out) => QuantVerdict::Succeed(out),
        Err(errors) => QuantVerdict::Fail(errors),
    }
}

// ── internals ───────────────────────────────────────────────────────────

struct Ctx<'a, 'p> {
    funs: &'a FunEnv<'p>,
}

impl<'a, 'p> Ctx<'a, 'p> {
    /// `visible` bounds which functions may be called: indices below it.
    /// Statements see every function; a function body sees only earlier
    /// declarations.
    fn infer(
        &self,
        expr: &UnitExpression,
        env: &QuantEnv,
        visible: usize,
    ) -> Result<QuantName, QuantError> {
        match expr {
            UnitExpression::Var { name, span } => {
                env.get(name).cloned().ok_or_else(|| QuantError {
                    loc: *span,
                    kind: QuantErrorKind::UnboundVariable { var: name.clone() },
                })
            }
            UnitExpression::Add { lhs, rhs, span } | UnitExpression::Sub { lhs, rhs, span } => {
                let l = self.infer(lhs, env, visible)?;
                let r = self.infer(rhs, env, visible)?;
                diamond(&l, &r).map_err(|e| self.algebra_error(e, *span))
            }
            UnitExpression::ScalarMul { value, .. } => self.infer(value, env, visible),
            UnitExpression::Mul { lhs, rhs, span } | UnitExpression::Div { lhs, rhs, span } => {
                let l = self.infer(lhs, env, visible)?;
                let r = self.infer(rhs, env, visible)?;
                triangle(&l, &r).map_err(|e| self.algebra_error(e, *span))
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
                    return Err(QuantError {
                        loc: *span,
                        kind: QuantErrorKind::UnknownFunction {
                            name: function.clone(),
                        },
                    });
                };
                self.invoke(index, decl, *span, args, env, visible)
            }
        }
    }

    fn algebra_error(&self, e: AlgebraError, span: Span) -> QuantError {
        let kind = match e {
            AlgebraError::Mismatch { left, right } => {
                QuantErrorKind::AdditionMismatch { left, right }
            }
            AlgebraError::UnresolvedQuantvar(v) => QuantErrorKind::Internal {
                message: format!("unresolved quantity variable {}", v),
            },
        };
        QuantError { loc: span, kind }
    }

    fn invoke(
        &self,
        index: usize,
        decl: &FunctionDecl,
        call_span: Span,
        args: &[UnitExpression],
        env: &QuantEnv,
        visible: usize,
    ) -> Result<QuantName, QuantError> {
        if args.len() != decl.params.len() {
            return Err(QuantError {
                loc: call_span,
                kind: QuantErrorKind::ArityMismatch {
                    function: decl.name.clone(),
                    expected: decl.params.len(),
                    found: args.len(),
                },
            });
        }

        let mut argnames = Vec::with_capacity(args.len());
        for arg in args {
            argnames.push((self.infer(arg, env, visible)?, arg.span()));
        }

        let (param_quants, return_quant) = if decl.has_quantvars() {
            let subst = unify_quantvars(decl, &argnames)?;
            let params = decl
                .params
                .iter()
                .map(|p| apply_subst(&p.quant, &subst))
                .collect::<Vec<_>>();
            (params, apply_subst(&decl.return_quant, &subst))
        } else {
            let params = decl
                .params
                .iter()
                .map(|p| p.quant.clone())
                .collect::<Vec<_>>();
            (params, decl.return_quant.clone())
        };

        // Parameter bindings, then each argument's promotion on top.
        let mut local = QuantEnv::new();
        for (param, quant) in decl.params.iter().zip(&param_quants) {
            local.bind(param.name.clone(), quant.clone());
        }
        for ((param, quant), (argname, argspan)) in
            decl.params.iter().zip(&param_quants).zip(&argnames)
        {
            match assign_op(&param.name, quant, argname, &QuantEnv::new()) {
                AssignResult::Succeed(bindings) => local = local.override_with(&bindings),
                AssignResult::Fail(f) if f.code == AssignFailCode::NameMismatch => {
                    return Err(QuantError {
                        loc: *argspan,
                        kind: QuantErrorKind::ArgumentMismatch {
                            function: decl.name.clone(),
                            param: param.name.clone(),
                            expected: quant.clone(),
                            found: argname.clone(),
                        },
                    });
                }
                AssignResult::Fail(_) => {
                    return Err(QuantError {
                        loc: *argspan,
                        kind: QuantErrorKind::Internal {
                            message: "quantity variable survived unification".to_string(),
                        },
                    });
                }
            }
        }

        let body_name = self.infer(&decl.body, &local, index)?;
        match diamond(&return_quant, &body_name) {
            Ok(result) => Ok(result),
            Err(AlgebraError::Mismatch { .. }) => Err(QuantError {
                loc: call_span,
                kind: QuantErrorKind::ReturnMismatch {
                    function: decl.name.clone(),
                    declared: return_quant,
                    found: body_name,
                },
            }),
            Err(AlgebraError::UnresolvedQuantvar(v)) => Err(QuantError {
                loc: call_span,
                kind: QuantErrorKind::Internal {
                    message: format!("quantity variable {} survived unification", v),
                },
            }),
        }
    }

    fn assign(
        &self,
        var: &str,
        span: Span,
        value: &UnitExpression,
        env: &QuantEnv,
        visible: usize,
    ) -> Result<QuantEnv, QuantError> {
        let lhs = env.get(var).cloned().ok_or_else(|| QuantError {
            loc: span,
            kind: QuantErrorKind::UnboundVariable {
                var: var.to_string(),
            },
        })?;
        let rhs = self.infer(value, env, visible)?;
        match assign_op(var, &lhs, &rhs, env) {
            AssignResult::Succeed(next) => Ok(next),
            AssignResult::Fail(f) if f.code == AssignFailCode::NameMismatch => Err(QuantError {
                loc: span,
                kind: QuantErrorKind::AssignMismatch {
                    var: var.to_string(),
                    bound: f.lhs,
                    value: f.rhs,
                },
            }),
            AssignResult::Fail(_) => Err(QuantError {
                loc: span,
                kind: QuantErrorKind::Internal {
                    message: "quantity variable reached an assignment".to_string(),
                },
            }),
        }
    }

    fn thread(&self, stmts: &[Statement], env: QuantEnv) -> Result<QuantEnv, Vec<QuantError>> {
        let mut current = env;
        for stmt in stmts {
            match stmt {
                Statement::Assign {
                    var, value, span, ..
                } => {
                    current = self
                        .assign(var, *span, value, &current, self.funs.len())
                        .map_err(|e| vec![e])?;
                }
                Statement::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    let before = current.clone();
                    let after_then = self.thread(then_branch, current)?;
                    match self.thread(else_branch, after_then.clone()) {
                        Ok(after_else) => current = after_else,
                        Err(mut errors) => {
                            // The else branch runs under the then branch's
                            // promotions; flag failures that hinge on one.
                            if let Some(first) = errors.first() {
                                if let QuantErrorKind::AssignMismatch { var, .. } = &first.kind {
                                    let promoted = after_then.get(var);
                                    if promoted != before.get(var) {
                                        if let Some(name) = promoted {
                                            errors.push(QuantError {
                                                loc: first.loc,
                                                kind: QuantErrorKind::BranchNote {
                                                    var: var.clone(),
                                                    promoted: name.clone(),
                                                },
                                            });
                                        }
                                    }
                                }
                            }
                            return Err(errors);
                        }
                    }
                }
            }
        }
        Ok(current)
    }
}

fn apply_subst(q: &QuantName, subst: &BTreeMap<String, QuantName>) -> QuantName {
    match q {
        QuantName::Quantvar(v) => subst.get(v).cloned().unwrap_or(QuantName::Noname),
        other => other.clone(),
    }
}

/// Union-find over parameter indices with path compression; the class
/// representative is the lowest index in the class.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
