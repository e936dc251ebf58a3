//! End-to-end acceptance suite.
//!
//! Each test prints a `[PASS]` line (visible with `--nocapture`) after its
//! assertions hold, so the suite doubles as a checklist:
//!
//! ```text
//! cargo test -p quantlint --test acceptance -- --nocapture
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use quantlint::diag::{codes, Severity};
use quantlint::dim_check::{build_dim_env, check_dims_program, infer_dims, DimVerdict};
use quantlint::dims::{conversion_factor, dim_div, dim_mul, unit_to_spec, Dims, UnitTable};
use quantlint::driver::{check_source, exit_code, CheckFlags};
use quantlint::lint::{lint_discipline, LintRule};
use quantlint::quant_check::{
    check_quant_program, check_quant_stmts, infer_quant, initial_quant_env, FunEnv, QuantErrorKind,
    QuantVerdict,
};
use quantlint::quantity::{assign_op, diamond, triangle, AssignResult, QuantEnv, QuantName};
use quantlint::rational::{int, ratio};
use quantlint::syntax::ast::{Span, Statement, UnitExpression};
use quantlint::syntax::{parse, pretty};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn corpus() -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|entry| entry.expect("corpus entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "uq"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().to_string();
            let text = fs::read_to_string(&p).expect("corpus file");
            (name, text)
        })
        .collect();
    files.sort();
    files
}

fn corpus_file(name: &str) -> String {
    fs::read_to_string(corpus_dir().join(name)).expect("corpus file")
}

fn named(n: &str) -> QuantName {
    QuantName::named(n)
}

fn line_col(src: &str, offset: usize) -> (u32, u32) {
    let mut line = 1u32;
    let mut column = 1u32;
    for (i, c) in src.char_indices() {
        if i == offset {
            break;
        }
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

// ── criterion 1: golden derivations ─────────────────────────────────────

#[test]
fn criterion_1_golden_derivations() {
    let table = UnitTable::standard();

    // Listing 1: named parameters, named arguments: Succeed.
    let src = corpus_file("listing1_addtq.uq");
    let program = parse(&src).unwrap();
    assert!(check_dims_program(&program, &table).is_valid());
    let initial = initial_quant_env(&program);
    match check_quant_program(&program) {
        QuantVerdict::Succeed(out) => assert_eq!(out, initial),
        other => panic!("listing 1 must succeed, got {:?}", other),
    }

    // Listing 2: a Work argument against a torque parameter fails exactly
    // at the argument binding.
    let src = corpus_file("listing2_type1.uq");
    let program = parse(&src).unwrap();
    assert!(check_dims_program(&program, &table).is_valid());
    let w_offset = src.find("addtq(t, w)").unwrap() + "addtq(t, ".len();
    match check_quant_program(&program) {
        QuantVerdict::Fail(errs) => {
            let err = &errs[0];
            match &err.kind {
                QuantErrorKind::ArgumentMismatch {
                    function,
                    param,
                    expected,
                    found,
                } => {
                    assert_eq!(function, "addtq");
                    assert_eq!(param, "y");
                    assert_eq!(expected, &named("T"));
                    assert_eq!(found, &named("W"));
                }
                other => panic!("listing 2 must fail at the parameter, got {:?}", other),
            }
            assert_eq!(err.loc.start.offset, w_offset, "failure must sit on `w`");
            assert_eq!(err.loc.end.offset, w_offset + 1);
            assert_eq!(
                (err.loc.start.line, err.loc.start.column),
                line_col(&src, w_offset)
            );
        }
        other => panic!("listing 2 must fail, got {:?}", other),
    }

    // Listing 3: nameless interface defers the clash into the body x + y.
    let src = corpus_file("listing3_noname_iface.uq");
    let program = parse(&src).unwrap();
    assert!(check_dims_program(&program, &table).is_valid());
    let body_offset = src.find("is x + y").unwrap() + "is ".len();
    match check_quant_program(&program) {
        QuantVerdict::Fail(errs) => {
            let err = &errs[0];
            match &err.kind {
                QuantErrorKind::AdditionMismatch { left, right } => {
                    assert_eq!(left, &named("T"));
                    assert_eq!(right, &named("W"));
                }
                other => panic!("listing 3 must fail inside the body, got {:?}", other),
            }
            assert_eq!(
                err.loc.start.offset, body_offset,
                "failure must sit on x + y"
            );
            assert_eq!(err.loc.end.offset, body_offset + "x + y".len());
            assert_eq!(
                (err.loc.start.line, err.loc.start.column),
                line_col(&src, body_offset)
            );
        }
        other => panic!("listing 3 must fail, got {:?}", other),
    }

    println!("[PASS] criterion 1: three golden derivations reproduce verdicts and locations");
}

// ── criterion 2: the multiplication hole and the discipline ────────────

#[test]
fn criterion_2_type2_scenarios() {
    let table = UnitTable::standard();

    let plain_src = corpus_file("type2_plain.uq");
    let plain = parse(&plain_src).unwrap();
    assert!(check_dims_program(&plain, &table).is_valid());
    assert!(check_quant_program(&plain).is_succeed());
    let warnings = lint_discipline(&plain);
    let muls = warnings
        .iter()
        .filter(|w| w.rule == LintRule::DiscMul)
        .count();
    let nonames = warnings
        .iter()
        .filter(|w| w.rule == LintRule::DiscNonameAssign)
        .count();
    assert_eq!((muls, nonames), (1, 1), "warnings: {:?}", warnings);

    let strict = CheckFlags {
        strict_discipline: true,
        ..Default::default()
    };
    let report = check_source("type2_plain.uq", &plain_src, &table, &strict);
    assert_eq!(exit_code(std::slice::from_ref(&report)), 1);
    assert!(report
        .diagnostics
        .iter()
        .any(|d| d.code == codes::DISC_MUL && d.severity == Severity::Error));
    assert!(report
        .diagnostics
        .iter()
        .any(|d| d.code == codes::DISC_NONAME_ASSIGN && d.severity == Severity::Error));
    let relaxed = check_source("type2_plain.uq", &plain_src, &table, &CheckFlags::default());
    assert_eq!(exit_code(std::slice::from_ref(&relaxed)), 0);

    let fun_src = corpus_file("type2_function.uq");
    let fun = parse(&fun_src).unwrap();
    assert!(check_dims_program(&fun, &table).is_valid());
    assert!(check_quant_program(&fun).is_succeed());
    assert!(lint_discipline(&fun).is_empty());
    let report = check_source("type2_function.uq", &fun_src, &table, &strict);
    assert_eq!(exit_code(std::slice::from_ref(&report)), 0);

    println!("[PASS] criterion 2: multiplication hole passes both checks and strict discipline rejects it");
}

// ── criteria 3 and 4: oracle equivalence over enumerated trees ──────────

fn leaf_var(name: &str) -> UnitExpression {
    UnitExpression::Var {
        name: name.to_string(),
        span: Span::default(),
    }
}

fn leaf_call(function: &str) -> UnitExpression {
    UnitExpression::Call {
        function: function.to_string(),
        args: vec![leaf_var("un")],
        span: Span::default(),
    }
}

fn scalar_of(value: &UnitExpression) -> UnitExpression {
    UnitExpression::ScalarMul {
        scalar: ratio(2, 1),
        value: Box::new(value.clone()),
        span: Span::default(),
    }
}

fn add_of(lhs: &UnitExpression, rhs: &UnitExpression) -> UnitExpression {
    UnitExpression::Add {
        lhs: Box::new(lhs.clone()),
        rhs: Box::new(rhs.clone()),
        span: Span::default(),
    }
}

/// All trees one level taller: the leaves, a scalar multiple of each known
/// tree, and an addition of every ordered pair of known trees.
fn grow(leaves: &[UnitExpression], level: &[UnitExpression]) -> Vec<UnitExpression> {
    let mut next = leaves.to_vec();
    for x in level {
        next.push(scalar_of(x));
    }
    for a in level {
        for b in level {
            next.push(add_of(a, b));
        }
    }
    next
}

/// Independent oracle: collect the distinct names among the leaves (calls
/// count as leaves of their declared return name). Inference must succeed
/// iff at most one name occurs, yielding that name or Noname.
fn oracle(
    expr: &UnitExpression,
    tau: &QuantEnv,
    call_names: &HashMap<&str, QuantName>,
) -> Option<QuantName> {
    fn collect(
        expr: &UnitExpression,
        tau: &QuantEnv,
        call_names: &HashMap<&str, QuantName>,
        out: &mut BTreeSet<String>,
    ) {
        match expr {
            UnitExpression::Var { name, .. } => {
                if let Some(QuantName::Named(n)) = tau.get(name) {
                    out.insert(n.clone());
                }
            }
            UnitExpression::Call { function, .. } => {
                if let Some(QuantName::Named(n)) = call_names.get(function.as_str()) {
                    out.insert(n.clone());
                }
            }
            UnitExpression::ScalarMul { value, .. } => collect(value, tau, call_names, out),
            UnitExpression::Add { lhs, rhs, .. } => {
                collect(lhs, tau, call_names, out);
                collect(rhs, tau, call_names, out);
            }
            other => panic!("unexpected node in enumeration: {:?}", other),
        }
    }
    let mut names = BTreeSet::new();
    collect(expr, tau, call_names, &mut names);
    match names.len() {
        0 => Some(QuantName::Noname),
        1 => Some(QuantName::Named(names.into_iter().next().unwrap())),
        _ => None,
    }
}

const ORACLE_PROGRAM: &str = "begin\n  na : float of m named A;\n  nb : float of m named B;\n  nc : float of m named C;\n  un : float of m;\n  fun fA (x : m) : m named A is x;\n  fun fB (x : m) : m named B is x;\n  fun fC (x : m) : m named C is x\nin\nend\n";

fn check_agreement(
    expr: &UnitExpression,
    tau: &QuantEnv,
    funs: &FunEnv,
    call_names: &HashMap<&str, QuantName>,
) {
    let expected = oracle(expr, tau, call_names);
    let got = infer_quant(expr, tau, funs);
    match (expected, got) {
        (Some(name), Ok(result)) => assert_eq!(name, result),
        (None, Err(_)) => {}
        (expected, got) => panic!(
            "oracle disagreement: oracle {:?}, checker {:?}, tree {:?}",
            expected, got, expr
        ),
    }
}

#[test]
fn criterion_3_addition_oracle_equivalence() {
    let program = parse(ORACLE_PROGRAM).unwrap();
    let funs = FunEnv::build(&program).unwrap();
    let tau = initial_quant_env(&program);
    let call_names = HashMap::new();

    let leaves = vec![
        leaf_var("na"),
        leaf_var("nb"),
        leaf_var("nc"),
        leaf_var("un"),
    ];
    let h2 = grow(&leaves, &leaves);
    let h3 = grow(&leaves, &h2);
    assert_eq!(h3.len(), 604);

    let mut cases = 0usize;
    for leaf in &leaves {
        check_agreement(leaf, &tau, &funs, &call_names);
        cases += 1;
    }
    for x in &h3 {
        check_agreement(&scalar_of(x), &tau, &funs, &call_names);
        cases += 1;
    }
    for a in &h3 {
        for b in &h3 {
            check_agreement(&add_of(a, b), &tau, &funs, &call_names);
            cases += 1;
        }
    }

    assert_eq!(cases, 4 + 604 + 604 * 604);
    assert!(cases >= 10_000);
    println!(
        "[PASS] criterion 3: {} enumerated trees agree with the leaf-name oracle",
        cases
    );
}

#[test]
fn criterion_4_call_leaf_oracle_equivalence() {
    let program = parse(ORACLE_PROGRAM).unwrap();
    let funs = FunEnv::build(&program).unwrap();
    let tau = initial_quant_env(&program);
    let call_names: HashMap<&str, QuantName> =
        HashMap::from([("fA", named("A")), ("fB", named("B")), ("fC", named("C"))]);

    let leaves = vec![
        leaf_var("na"),
        leaf_var("nb"),
        leaf_var("nc"),
        leaf_var("un"),
        leaf_call("fA"),
        leaf_call("fB"),
        leaf_call("fC"),
    ];
    let h2 = grow(&leaves, &leaves);
    let h3 = grow(&leaves, &h2);
    assert_eq!(h3.len(), 4039);

    let mut cases = 0usize;
    // Exhaustive up to three levels.
    for tree in &h3 {
        check_agreement(tree, &tau, &funs, &call_names);
        cases += 1;
    }
    // Scalar-rooted and a seeded sample of addition-rooted level-four trees.
    for x in &h3 {
        check_agreement(&scalar_of(x), &tau, &funs, &call_names);
        cases += 1;
    }
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next_index = |len: usize| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 33) as usize) % len
    };
    for _ in 0..60_000 {
        let a = &h3[next_index(h3.len())];
        let b = &h3[next_index(h3.len())];
        check_agreement(&add_of(a, b), &tau, &funs, &call_names);
        cases += 1;
    }

    assert!(cases >= 10_000);
    println!(
        "[PASS] criterion 4: {} trees with named-return call leaves agree with the oracle",
        cases
    );
}

// ── criterion 5: the operator tables, verbatim ──────────────────────────

#[test]
fn criterion_5_algebra_tables() {
    let t = named("T");
    let w = named("W");
    let no = QuantName::Noname;

    // Addition compatibility: four cases.
    assert_eq!(diamond(&t, &t).unwrap(), t);
    assert_eq!(diamond(&t, &no).unwrap(), t);
    assert_eq!(diamond(&no, &t).unwrap(), t);
    assert_eq!(diamond(&no, &no).unwrap(), no);
    assert!(diamond(&t, &w).is_err());

    // Multiplication: four cases, always Noname.
    assert_eq!(triangle(&t, &w).unwrap(), no);
    assert_eq!(triangle(&t, &no).unwrap(), no);
    assert_eq!(triangle(&no, &t).unwrap(), no);
    assert_eq!(triangle(&no, &no).unwrap(), no);

    // Assignment: five cases, including the environment override.
    let env: QuantEnv = [
        ("uv".to_string(), no.clone()),
        ("tv".to_string(), t.clone()),
    ]
    .into_iter()
    .collect();

    match assign_op("tv", &t, &t, &env) {
        AssignResult::Succeed(out) => assert_eq!(out, env),
        other => panic!("Named/Named must succeed, got {:?}", other),
    }
    assert!(matches!(
        assign_op("tv", &t, &w, &env),
        AssignResult::Fail(_)
    ));
    match assign_op("tv", &t, &no, &env) {
        AssignResult::Succeed(out) => assert_eq!(out, env),
        other => panic!("Named/Noname must succeed, got {:?}", other),
    }
    match assign_op("uv", &no, &no, &env) {
        AssignResult::Succeed(out) => assert_eq!(out, env),
        other => panic!("Noname/Noname must succeed, got {:?}", other),
    }
    match assign_op("uv", &no, &t, &env) {
        AssignResult::Succeed(out) => {
            assert_eq!(out, env.with_binding("uv", t.clone()));
            assert_eq!(out.get("uv"), Some(&t));
        }
        other => panic!(
            "Noname/Named must succeed with an override, got {:?}",
            other
        ),
    }

    println!("[PASS] criterion 5: 4 addition, 4 multiplication, 5 assignment cases hold verbatim");
}

// ── criterion 6: dimension algebra ──────────────────────────────────────

#[test]
fn criterion_6_dimension_algebra() {
    let table = UnitTable::standard();

    // Each alias reconstructs its base-unit expansion.
    let expansions = [
        ("Hz", (0, 0, -1), "s^-1"),
        ("N", (1, 1, -2), "m * kg * s^-2"),
        ("Pa", (-1, 1, -2), "m^-1 * kg * s^-2"),
        ("J", (2, 1, -2), "m^2 * kg * s^-2"),
        ("W", (2, 1, -3), "m^2 * kg * s^-3"),
    ];
    for (symbol, (l, m, t), definition) in expansions {
        let spec = table.get(symbol).unwrap();
        assert_eq!(spec.dims, Dims::from_ints(l, m, t), "dims of {}", symbol);
        assert_eq!(spec.factor, int(1));
        assert_eq!(
            &unit_to_spec(definition, &table).unwrap(),
            spec,
            "{} vs {}",
            symbol,
            definition
        );
    }

    // The statutory international yard, exactly.
    let yard = table.get("yard").unwrap();
    let metre = table.get("m").unwrap();
    let conv = conversion_factor(yard, metre).unwrap();
    assert_eq!(conv.scale, ratio(1143, 1250));
    assert!(conv.is_linear());
    let back = conversion_factor(metre, yard).unwrap();
    assert_eq!(&conv.scale * &back.scale, int(1));

    // Group laws under randomized rational exponent vectors.
    let rational = (-20i64..=20, 1i64..=12).prop_map(|(n, d)| ratio(n, d));
    let dims =
        (rational.clone(), rational.clone(), rational).prop_map(|(a, b, c)| Dims::new([a, b, c]));
    let mut runner = TestRunner::new(Config {
        cases: 1024,
        ..Config::default()
    });
    let cases = std::cell::Cell::new(0usize);
    runner
        .run(&(dims.clone(), dims.clone(), dims), |(a, b, c)| {
            cases.set(cases.get() + 1);
            let identity = Dims::dimensionless();
            prop_assert_eq!(dim_mul(&a, &b), dim_mul(&b, &a));
            prop_assert_eq!(dim_mul(&dim_mul(&a, &b), &c), dim_mul(&a, &dim_mul(&b, &c)));
            prop_assert_eq!(dim_mul(&a, &identity), a.clone());
            let inverse = dim_div(&identity, &a);
            prop_assert_eq!(dim_mul(&a, &inverse), identity);
            prop_assert_eq!(dim_mul(&dim_div(&a, &b), &b), a.clone());
            Ok(())
        })
        .unwrap();
    let cases = cases.get();
    assert!(cases >= 1000);

    println!(
        "[PASS] criterion 6: alias expansions, exact yard conversion, and group laws over {} random vectors",
        cases
    );
}

// ── criterion 7: the downward-casting counterexample stays rejected ─────

#[test]
fn criterion_7_associativity_regression() {
    // Work ◇ (Torque ◇ Noname) must not evaluate: the inner join casts
    // upward to Torque and then clashes with Work.
    let inner = diamond(&named("Torque"), &QuantName::Noname).unwrap();
    assert_eq!(inner, named("Torque"));
    assert!(diamond(&named("Work"), &inner).is_err());

    // The same shape as a program.
    let src = corpus_file("s26_assoc_regression.uq");
    let program = parse(&src).unwrap();
    let table = UnitTable::standard();
    assert!(check_dims_program(&program, &table).is_valid());
    match check_quant_program(&program) {
        QuantVerdict::Fail(errs) => match &errs[0].kind {
            QuantErrorKind::AdditionMismatch { left, right } => {
                assert_eq!(left, &named("Work"));
                assert_eq!(right, &named("Torque"));
            }
            other => panic!("expected an addition mismatch, got {:?}", other),
        },
        other => panic!("the counterexample must not type-check, got {:?}", other),
    }

    println!("[PASS] criterion 7: Work + (Torque + unnamed) is rejected");
}

// ── criterion 8: parser round trip over the corpus ──────────────────────

#[test]
fn criterion_8_roundtrip_corpus() {
    let files = corpus();
    assert!(
        files.len() >= 26,
        "corpus should hold the worked listings plus at least twenty synthetic programs, found {}",
        files.len()
    );
    for (name, source) in &files {
        let first = parse(source).unwrap_or_else(|e| panic!("{} fails to parse: {}", name, e));
        let printed = pretty(&first);
        let second = parse(&printed)
            .unwrap_or_else(|e| panic!("{} fails to reparse: {}\n{}", name, e, printed));
        assert_eq!(
            first.strip_spans(),
            second.strip_spans(),
            "{} does not round-trip",
            name
        );
        assert_eq!(
            printed,
            pretty(&second),
            "{} printer is not a fixpoint",
            name
        );
    }
    println!(
        "[PASS] criterion 8: parse-pretty-parse round trip over {} corpus programs",
        files.len()
    );
}

// ── criterion 9: environment invariants across the corpus run ───────────

#[test]
fn criterion_9_environment_invariants() {
    let table = UnitTable::standard();
    let mut monotone_checked = 0usize;
    let mut rho_checked = 0usize;

    for (name, source) in corpus() {
        let program = parse(&source).unwrap_or_else(|e| panic!("{} fails to parse: {}", name, e));

        // The dimension environment never changes across checking.
        if let Ok(env) = build_dim_env(&program.decls, &table) {
            let snapshot = env.clone();
            let funs = FunEnv::build_lenient(&program);
            for stmt in &program.stmts {
                if let Statement::Assign { value, .. } = stmt {
                    let _ = infer_dims(value, &env, &funs, &table);
                }
            }
            let _ = check_dims_program(&program, &table);
            assert_eq!(env, snapshot, "{}: dimension environment mutated", name);
            rho_checked += 1;
        }

        // Quantity bindings only ever gain names.
        if !check_dims_program(&program, &table).is_valid() {
            continue;
        }
        let initial = initial_quant_env(&program);
        if let QuantVerdict::Succeed(finished) = check_quant_program(&program) {
            assert!(
                finished.is_monotone_extension_of(&initial),
                "{}: non-monotone environment update",
                name
            );
            // Re-running from the final environment is stable.
            let funs = FunEnv::build(&program).unwrap();
            match check_quant_stmts(&program.stmts, &finished, &funs) {
                QuantVerdict::Succeed(again) => {
                    assert_eq!(again, finished, "{}: unstable final environment", name)
                }
                other => panic!("{}: rerun from final environment failed: {:?}", name, other),
            }
            monotone_checked += 1;
        }
    }

    assert!(rho_checked >= 20);
    assert!(monotone_checked >= 10);
    println!(
        "[PASS] criterion 9: rho immutable in {} programs, tau monotone and stable in {}",
        rho_checked, monotone_checked
    );
}

// ── corpus verdicts: every file lands where it should ───────────────────

#[test]
fn corpus_verdicts_match_expectations() {
    // (file, dims valid, quant succeeds-if-run, lint warning count)
    let expectations: &[(&str, bool, Option<bool>, usize)] = &[
        ("listing1_addtq.uq", true, Some(true), 0),
        ("listing2_type1.uq", true, Some(false), 0),
        ("listing3_noname_iface.uq", true, Some(false), 0),
        ("type2_plain.uq", true, Some(true), 2),
        ("type2_function.uq", true, Some(true), 0),
        ("promote_t1.uq", true, Some(true), 0),
        ("s01_empty.uq", true, Some(true), 0),
        ("s02_decl_only.uq", true, Some(true), 0),
        ("s03_seq_promote.uq", true, Some(true), 0),
        ("s04_if_threading.uq", true, Some(true), 0),
        ("s05_nested_if.uq", true, Some(true), 0),
        ("s06_fun_chain.uq", true, Some(true), 0),
        ("s07_generic_add.uq", true, Some(true), 0),
        ("s08_generic_conflict.uq", true, Some(false), 0),
        ("s09_noname_params_promote.uq", true, Some(true), 0),
        ("s10_sub_div.uq", true, Some(true), 1),
        ("s11_guard_dims_fail.uq", false, None, 0),
        ("s12_yard_note.uq", true, Some(true), 0),
        ("s13_unknown_unit.uq", false, None, 0),
        ("s14_unbound_var.uq", false, None, 0),
        ("s15_arity.uq", false, None, 0),
        ("s16_return_mismatch.uq", true, Some(false), 0),
        ("s17_suppress.uq", true, Some(true), 0),
        ("s18_format_stress.uq", true, Some(true), 0),
        ("s19_dimensionless.uq", true, Some(true), 1),
        ("s20_compare_ops.uq", true, Some(true), 0),
        ("s21_branch_conflict.uq", true, Some(false), 0),
        ("s22_mixed_scale_add.uq", true, Some(true), 0),
        ("s23_overlay_units.uq", false, None, 0),
        ("s24_fun_many_params.uq", true, Some(true), 0),
        ("s25_else_empty.uq", true, Some(true), 0),
        ("s26_assoc_regression.uq", true, Some(false), 0),
    ];

    let table = UnitTable::standard();
    let all = corpus();
    assert_eq!(
        all.len(),
        expectations.len(),
        "expectation table out of date"
    );

    for (file, dims_valid, quant_ok, warnings) in expectations {
        let source = corpus_file(file);
        let program = parse(&source).unwrap_or_else(|e| panic!("{}: {}", file, e));
        let verdict = check_dims_program(&program, &table);
        assert_eq!(verdict.is_valid(), *dims_valid, "{}: dims verdict", file);
        if let Some(expected) = quant_ok {
            assert_eq!(
                check_quant_program(&program).is_succeed(),
                *expected,
                "{}: quantity verdict",
                file
            );
        }
        let lint = lint_discipline(&program);
        assert_eq!(lint.len(), *warnings, "{}: lint warnings {:?}", file, lint);
    }

    match check_dims_program(&parse(&corpus_file("s12_yard_note.uq")).unwrap(), &table) {
        DimVerdict::Valid { notes } => assert_eq!(notes.len(), 1),
        other => panic!("expected a conversion note, got {:?}", other),
    }

    println!(
        "[PASS] corpus: all {} programs land on their expected verdicts",
        expectations.len()
    );
}
