use std::collections::{BTreeSet, HashSet};

use elbt_core::corpus;
use elbt_core::engine::{random_suite, run, seed_suite, suite_fingerprint, EngineError, LbtConfig};
use elbt_core::lang::{execute, parse, Value};
use elbt_core::learners::parse_combo;
use elbt_core::specgen::SpecSet;

fn config(code: &str, seed: u64) -> LbtConfig {
    LbtConfig::new(parse_combo(code).unwrap().spec(), seed)
}

#[test]
fn default_run_has_44_iterations_and_consistent_trace() {
    let (sut, spec) = (corpus::triangle(), corpus::triangle_spec());
    let (suite, trace) = run(&config("bc-dtc", 3), &spec, &sut).unwrap();
    assert_eq!(suite.len(), 50);
    assert_eq!(trace.records.len(), 44);

    let inputs: HashSet<&Vec<i64>> = suite.iter().map(|t| &t.input).collect();
    assert_eq!(inputs.len(), 50);
    for t in &suite {
        assert_eq!(execute(&sut, &t.input).unwrap(), t.expected);
    }
    for (k, r) in trace.records.iter().enumerate() {
        let selected = &suite[6 + k];
        assert_eq!(r.suite_size, 7 + k);
        assert_eq!(r.training_size, 6 + k);
        assert_eq!(r.training_fingerprint, suite_fingerprint(&suite[..6 + k]));
        assert_eq!(selected.input, r.selected_input);
        assert_eq!(selected.iteration, k + 1);
        assert_eq!(selected.utility_at_selection, r.max_utility);
        assert!(r.candidates > 0);
    }
}

#[test]
fn runs_are_reproducible() {
    let (sut, spec) = (corpus::triangle(), corpus::triangle_spec());
    let a = run(&config("abc-dtc", 42), &spec, &sut).unwrap();
    let b = run(&config("abc-dtc", 42), &spec, &sut).unwrap();
    assert_eq!(a, b);
    let c = run(&config("abc-dtc", 43), &spec, &sut).unwrap();
    assert_ne!(a.0, c.0);
}

#[test]
fn regression_run_completes() {
    let (sut, spec) = (corpus::find_middle(), corpus::find_middle_spec());
    let (suite, trace) = run(&config("gbr", 1), &spec, &sut).unwrap();
    assert_eq!(suite.len(), 50);
    assert!(trace.records.iter().all(|r| r.max_utility >= 0.0));
}

#[test]
fn constant_program_selects_by_tie_break() {
    let sut = parse("fn f(x, y, z) { return \"invalid\"; }").unwrap();
    let spec = corpus::triangle_spec();
    for code in ["bc-dtc", "abc-lor", "gbc"] {
        let (suite, trace) = run(&config(code, 9), &spec, &sut).unwrap();
        assert_eq!(suite.len(), 50);
        assert!(trace.records.iter().all(|r| r.max_utility == 0.0), "{code}");
    }
}

#[test]
fn seed_suites() {
    let tri = seed_suite(&corpus::triangle_spec(), &corpus::triangle(), 6, 0).unwrap();
    let classes: BTreeSet<&Value> = tri.iter().map(|t| &t.expected).collect();
    assert!(classes.len() >= 2);

    let mid = seed_suite(&corpus::find_middle_spec(), &corpus::find_middle(), 6, 0).unwrap();
    for t in &mid {
        let mut s = t.input.clone();
        s.sort();
        assert_eq!(t.expected, Value::Int(s[1]));
    }

    let one = SpecSet::parse("var x in [1,3]; var y in [1,3]; branch only { x == 1; y == 1; }").unwrap();
    let p = parse("fn f(x, y) { return x; }").unwrap();
    assert!(matches!(
        seed_suite(&one, &p, 2, 0),
        Err(EngineError::Exhausted { found: 1, wanted: 2 })
    ));
}

#[test]
fn program_faults_abort() {
    let p = parse("fn f(x, y, z) { return x / (y - z); }").unwrap();
    let spec = corpus::triangle_spec();
    assert!(matches!(seed_suite(&spec, &p, 6, 0), Err(EngineError::Fault { .. })));
}

#[test]
fn random_suites() {
    let (sut, spec) = (corpus::triangle(), corpus::triangle_spec());
    let a = random_suite(&spec, &sut, 50, 5).unwrap();
    assert_eq!(a.len(), 50);
    assert_eq!(a.iter().map(|t| &t.input).collect::<HashSet<_>>().len(), 50);
    assert_eq!(a, random_suite(&spec, &sut, 50, 5).unwrap());

    let equilateral = Value::Class("equilateral".into());
    let count: usize = (0..10)
        .map(|s| {
            random_suite(&spec, &sut, 50, s)
                .unwrap()
                .iter()
                .filter(|t| t.expected == equilateral)
                .count()
        })
        .sum();
    assert!(count <= 2, "{count}");
}

#[test]
fn invalid_configs() {
    let (sut, spec) = (corpus::triangle(), corpus::triangle_spec());
    let mut c = config("rfc", 0);
    c.batch_size = 1;
    assert!(matches!(run(&c, &spec, &sut), Err(EngineError::Config(_))));
    assert!(matches!(
        run(&config("br-lir", 0), &spec, &sut),
        Err(EngineError::Learn(_))
    ));
}
