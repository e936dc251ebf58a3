//! Runs the passes over source files and renders the results.
//!
//! Each file is parsed, dimension-checked, quantity-checked (skipped when
//! the dimensional pass fails, which it assumes), and linted. The outcome is
//! a serializable per-file report; the human-readable rendering is a pure
//! function of that report, so `--json` output can reproduce it exactly.
//!
//! Exit codes: 0 all clean, 1 checking or strict-lint errors, 2 parse/IO
//! errors.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diag::{codes, Diagnostic, Phase, Severity};
use crate::dim_check::check_dims_program;
use crate::dims::UnitTable;
use crate::lint::lint_discipline;
use crate::quant_check::{check_quant_program, initial_quant_env, QuantVerdict};
use crate::rational::{format_rational, Rational};
use crate::syntax::ast::{Decl, Program};
use crate::syntax::parse;

#[derive(Debug, Clone, Default)]
pub struct CheckFlags {
    pub json: bool,
    pub strict_discipline: bool,
    pub units: Option<PathBuf>,
    pub dump_env: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Promotion {
    pub var: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoBinding {
    pub var: String,
    pub unit: String,
    pub dims: String,
    pub factor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauBinding {
    pub var: String,
    pub quantity: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvDump {
    pub rho: Vec<RhoBinding>,
    pub tau: Vec<TauBinding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileReport {
    pub schema: u32,
    pub file: String,
    pub parse: String,
    pub dims: String,
    pub quant: String,
    pub promotions: Vec<Promotion>,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env: Option<EnvDump>,
}

pub const SCHEMA_VERSION: u32 = 1;

pub fn check_file(path: &Path, table: &UnitTable, flags: &CheckFlags) -> FileReport {
    let label = path.display().to_string();
    match fs::read_to_string(path) {
        Ok(source) => check_source(&label, &source, table, flags),
        Err(e) => FileReport {
            schema: SCHEMA_VERSION,
            file: label.clone(),
            parse: "fail".to_string(),
            dims: "skipped".to_string(),
            quant: "skipped".to_string(),
            promotions: Vec::new(),
            diagnostics: vec![Diagnostic {
                file: label,
                span: crate::diag::DiagSpan {
                    start_line: 0,
                    start_column: 0,
                    end_line: 0,
                    end_column: 0,
                },
                phase: Phase::Parse,
                severity: Severity::Error,
                code: codes::IO.to_string(),
                message: format!("cannot read file: {}", e),
                related: Vec::new(),
            }],
            env: None,
        },
    }
}

pub fn check_source(file: &str, source: &str, table: &UnitTable, flags: &CheckFlags) -> FileReport {
    let program = match parse(source) {
        Ok(p) => p,
        Err(e) => {
            return FileReport {
                schema: SCHEMA_VERSION,
                file: file.to_string(),
                parse: "fail".to_string(),
                dims: "skipped".to_string(),
                quant: "skipped".to_string(),
                promotions: Vec::new(),
                diagnostics: vec![Diagnostic::from_parse_error(file, &e)],
                env: None,
            };
        }
    };

    let mut diagnostics = Vec::new();

    let dim_verdict = check_dims_program(&program, table);
    for d in dim_verdict.diagnostics() {
        diagnostics.push(Diagnostic::from_dim(file, d));
    }
    let dims = if dim_verdict.is_valid() {
        "valid"
    } else {
        "fail"
    };

    // The quantity pass assumes dimensionally correct expressions, so a
    // dimensional failure gates it.
    let initial = initial_quant_env(&program);
    let mut promotions = Vec::new();
    let mut final_tau = initial.clone();
    let quant = if dim_verdict.is_valid() {
        match check_quant_program(&program) {
            QuantVerdict::Succeed(out) => {
                promotions = out
                    .promotions_from(&initial)
                    .into_iter()
                    .map(|(var, name)| Promotion {
                        var,
                        name: name.to_string(),
                    })
                    .collect();
                final_tau = out;
                "succeed"
            }
            QuantVerdict::Fail(errors) => {
                for e in &errors {
                    diagnostics.push(Diagnostic::from_quant(file, e));
                }
                "fail"
            }
        }
    } else {
        "skipped"
    };

    for w in lint_discipline(&program) {
        diagnostics.push(Diagnostic::from_lint(file, &w, flags.strict_discipline));
    }

    diagnostics.sort_by_key(Diagnostic::sort_key);

    let env = flags
        .dump_env
        .then(|| dump_env(&program, table, &final_tau));

    FileReport {
        schema: SCHEMA_VERSION,
        file: file.to_string(),
        parse: "ok".to_string(),
        dims: dims.to_string(),
        quant: quant.to_string(),
        promotions,
        diagnostics,
        env,
    }
}

fn dump_env(program: &Program, table: &UnitTable, tau: &crate::quantity::QuantEnv) -> EnvDump {
    let mut rho = Vec::new();
    for decl in &program.decls {
        if let Decl::Var(d) = decl {
            let (dims, factor) = match crate::dims::unit_to_spec(&d.unit, table) {
                Ok(spec) => (spec.dims.to_string(), render_factor(&spec.factor)),
                Err(_) => ("?".to_string(), "?".to_string()),
            };
            rho.push(RhoBinding {
                var: d.var.clone(),
                unit: d.unit.clone(),
                dims,
                factor,
            });
        }
    }
    rho.sort_by(|a, b| a.var.cmp(&b.var));
    let tau = tau
        .iter()
        .map(|(var, name)| TauBinding {
            var: var.clone(),
            quantity: name.to_string(),
        })
        .collect();
    EnvDump { rho, tau }
}

fn render_factor(factor: &Rational) -> String {
    format_rational(factor)
}

/// Human rendering; a pure function of the report.
pub fn render_report(report: &FileReport) -> String {
    let mut out = format!(
        "{}: parse {}, dims {}, quant {}\n",
        report.file, report.parse, report.dims, report.quant
    );
    for p in &report.promotions {
        out.push_str(&format!("  promotion: {} -> {}\n", p.var, p.name));
    }
    for d in &report.diagnostics {
        out.push_str(&format!("  {}\n", d.render()));
    }
    if let Some(env) = &report.env {
        for b in &env.rho {
            out.push_str(&format!(
                "  rho: {} : {} = dims {}, factor {}\n",
                b.var, b.unit, b.dims, b.factor
            ));
        }
        for b in &env.tau {
            out.push_str(&format!("  tau: {} -> {}\n", b.var, b.quantity));
        }
    }
    out
}

pub fn exit_code(reports: &[FileReport]) -> i32 {
    if reports.iter().any(|r| r.parse == "fail") {
        return 2;
    }
    let any_error = reports
        .iter()
        .any(|r| r.diagnostics.iter().any(|d| d.severity == Severity::Error));
    if any_error {
        1
    } else {
        0
    }
}

/// Checks each file independently, in input order.
pub fn run_check(files: &[PathBuf], flags: &CheckFlags) -> RunOutcome {
    let mut table = UnitTable::standard();
    if let Some(path) = &flags.units {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                return RunOutcome {
                    exit_code: 2,
                    output: format!("cannot read unit table {}: {}\n", path.display(), e),
                };
            }
        };
        if let Err(e) = table.load_overlay(&text) {
            return RunOutcome {
                exit_code: 2,
                output: format!("{}: {}\n", path.display(), e),
            };
        }
    }

    let reports: Vec<FileReport> = files.iter().map(|f| check_file(f, &table, flags)).collect();
    let mut output = String::new();
    for report in &reports {
        if flags.json {
            output.push_str(&serde_json::to_string(report).expect("reports serialize"));
            output.push('\n');
        } else {
            output.push_str(&render_report(report));
        }
    }
    RunOutcome {
        exit_code: exit_code(&reports),
        output,
    }
}
