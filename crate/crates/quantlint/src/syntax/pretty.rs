//! Canonical formatter. `parse(pretty(p))` is structurally equal to `p`
//! (spans excluded); comments are not preserved.

use std::fmt::Write;

use crate::quantity::QuantName;
use crate::rational::format_decimal;
use crate::syntax::ast::*;

pub fn pretty(program: &Program) -> String {
    let mut out = String::new();
    out.push_str("begin\n");
    for (i, decl) in program.decls.iter().enumerate() {
        let sep = if i + 1 < program.decls.len() { ";" } else { "" };
        match decl {
            Decl::Var(d) => {
                let _ = writeln!(
                    out,
                    "  {} : float of {}{}{}",
                    d.var,
                    d.unit,
                    named(&d.quant),
                    sep
                );
            }
            Decl::Fun(f) => {
                let params: Vec<String> = f
                    .params
                    .iter()
                    .map(|p| format!("{} : {}{}", p.name, p.unit, named(&p.quant)))
                    .collect();
                let _ = writeln!(
                    out,
                    "  fun {} ({}) : {}{} is {}{}",
                    f.name,
                    params.join(", "),
                    f.return_unit,
                    named(&f.return_quant),
                    expr(&f.body, Level::Add),
                    sep
                );
            }
        }
    }
    out.push_str("in\n");
    stmts(&mut out, &program.stmts, 1);
    out.push_str("end\n");
    out
}

fn named(q: &QuantName) -> String {
    match q {
        QuantName::Named(n) => format!(" named {}", n),
        QuantName::Noname => String::new(),
        QuantName::Quantvar(v) => format!(" named ?{}", v),
    }
}

fn stmts(out: &mut String, list: &[Statement], depth: usize) {
    for (i, stmt) in list.iter().enumerate() {
        let sep = if i + 1 < list.len() { ";" } else { "" };
        statement(out, stmt, depth, sep);
    }
}

fn statement(out: &mut String, stmt: &Statement, depth: usize, sep: &str) {
    let pad = "  ".repeat(depth);
    match stmt {
        Statement::Assign { var, value, .. } => {
            let _ = writeln!(out, "{}{} := {}{}", pad, var, expr(value, Level::Add), sep);
        }
        Statement::If {
            guard,
            then_branch,
            else_branch,
            ..
        } => {
            let _ = writeln!(
                out,
                "{}if {} {} {} then",
                pad,
                expr(&guard.lhs, Level::Add),
                guard.op.symbol(),
                expr(&guard.rhs, Level::Add)
            );
            stmts(out, then_branch, depth + 1);
            let _ = writeln!(out, "{}else", pad);
            stmts(out, else_branch, depth + 1);
            let _ = writeln!(out, "{}end{}", pad, sep);
        }
    }
}

/// Precedence levels; a node is parenthesised when printed in a slot that
/// demands tighter binding than the node provides.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Add = 1,
    Mul = 2,
    Unit = 3,
    Primary = 4,
}

fn level_of(e: &UnitExpression) -> Level {
    match e {
        UnitExpression::Add { .. } | UnitExpression::Sub { .. } => Level::Add,
        UnitExpression::Mul { .. } | UnitExpression::Div { .. } => Level::Mul,
        UnitExpression::ScalarMul { .. } => Level::Unit,
        UnitExpression::Var { .. } | UnitExpression::Call { .. } => Level::Primary,
    }
}

fn expr(e: &UnitExpression, min: Level) -> String {
    let body = match e {
        UnitExpression::Var { name, .. } => name.clone(),
        UnitExpression::Add { lhs, rhs, .. } => {
            format!("{} + {}", expr(lhs, Level::Add), expr(rhs, Level::Mul))
        }
        UnitExpression::Sub { lhs, rhs, .. } => {
            format!("{} - {}", expr(lhs, Level::Add), expr(rhs, Level::Mul))
        }
        UnitExpression::Mul { lhs, rhs, .. } => {
            format!("{} * {}", expr(lhs, Level::Mul), expr(rhs, Level::Primary))
        }
        UnitExpression::Div { lhs, rhs, .. } => {
            format!("{} / {}", expr(lhs, Level::Mul), expr(rhs, Level::Primary))
        }
        UnitExpression::ScalarMul { scalar, value, .. } => {
            format!("{} * {}", format_decimal(scalar), expr(value, Level::Unit))
        }
        UnitExpression::Call { function, args, .. } => {
            let rendered: Vec<String> = args.iter().map(|a| expr(a, Level::Add)).collect();
            format!("{}({})", function, rendered.join(", "))
        }
    };
    if level_of(e) < min {
        format!("({})", body)
    } else {
        body
    }
}
