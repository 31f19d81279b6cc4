//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use rand::seq::SliceRandom;
use rand::Rng;

use elbt_core::corpus;
use elbt_core::diversity::{mad_diversity, vote_diversity};
use elbt_core::engine::random_suite;
use elbt_core::experiment::{run_experiment, ComparisonTable, ExperimentConfig, RANDOM};
use elbt_core::lang::{execute, Value};
use elbt_core::learners::{
    BaseLearnerKind, Dataset, Ensemble, EnsembleSpec, Family, LinearRegression, LogisticParams, Method, Prediction,
    Problem, Targets, Task, Tree, TreeParams,
};
use elbt_core::mutation::{default_probes, MutantPool, DEFAULT_CAP};
use elbt_core::rng;
use elbt_core::specgen::{generate_batch, sample_branch, Provenance, SpecSet};

type Outcome = Result<String, String>;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn config(name: &str, out: &Path) -> ExperimentConfig {
    let dir = corpus_dir();
    let mut cfg = ExperimentConfig::new(dir.join(format!("{name}.sut")), dir.join(format!("{name}.spec")));
    cfg.out_dir = out.to_path_buf();
    cfg
}

fn run_config(name: &str, out: &Path) -> Result<ComparisonTable, String> {
    let cfg = config(name, out);
    let (sut, spec) = cfg.inputs().map_err(|e| e.to_string())?;
    let table = run_experiment(&cfg, &sut, &spec).map_err(|e| e.to_string())?;
    if !table.failures.is_empty() {
        return Err(format!(
            "{} runs failed, first: {}",
            table.failures.len(),
            table.failures[0].message
        ));
    }
    table.write(out).map_err(|e| e.to_string())?;
    Ok(table)
}

fn beats_random(table: &ComparisonTable, margin: f64) -> Outcome {
    let random = table.mean_kills(RANDOM);
    let mut worst = (String::new(), f64::INFINITY);
    let mut best = (String::new(), f64::NEG_INFINITY);
    for c in &table.combos {
        let m = table.mean_kills(c);
        if m < worst.1 {
            worst = (c.clone(), m);
        }
        if m > best.1 {
            best = (c.clone(), m);
        }
    }
    let detail = format!(
        "random {random:.1}, worst {} {:.1}, best {} {:.1} (+{:.1}%), pool {}",
        worst.0,
        worst.1,
        best.0,
        best.1,
        100.0 * (best.1 / random - 1.0),
        table.pool.capped
    );
    if table.pool.capped > DEFAULT_CAP {
        return Err(format!("pool exceeds cap: {detail}"));
    }
    if worst.1 < random {
        return Err(detail);
    }
    if best.1 < random * (1.0 + margin) {
        return Err(format!("best combo below margin: {detail}"));
    }
    Ok(detail)
}

fn triangle_oracle(a: i64, b: i64, c: i64) -> &'static str {
    let mut s = [a, b, c];
    s.sort();
    if s[0] <= 0 || s[0] + s[1] <= s[2] {
        "invalid"
    } else if s[0] == s[2] {
        "equilateral"
    } else if s[0] == s[1] || s[1] == s[2] {
        "isosceles"
    } else {
        "scalene"
    }
}

fn middle_oracle(x: i64, y: i64, z: i64) -> i64 {
    let mut s = [x, y, z];
    s.sort();
    s[1]
}

fn sut_oracles() -> Outcome {
    let mut r = rng::from_seed(8);
    let (tri, mid) = (corpus::triangle(), corpus::find_middle());
    for _ in 0..1000 {
        let t: Vec<i64> = (0..3).map(|_| r.gen_range(1..=200)).collect();
        let got = execute(&tri, &t).map_err(|f| format!("triangle {t:?}: {f}"))?;
        if got != Value::Class(triangle_oracle(t[0], t[1], t[2]).into()) {
            return Err(format!("triangle {t:?} gave {got}"));
        }
        let m: Vec<i64> = (0..3).map(|_| r.gen_range(-100..=100)).collect();
        let got = execute(&mid, &m).map_err(|f| format!("find_middle {m:?}: {f}"))?;
        if got != Value::Int(middle_oracle(m[0], m[1], m[2])) {
            return Err(format!("find_middle {m:?} gave {got}"));
        }
    }
    Ok("1000 inputs per program agree with the reference implementations".into())
}

fn mad_oracle(p: &[f64]) -> f64 {
    // Deviations above the mean carry half of the total absolute deviation.
    let n = p.len() as f64;
    let mean = p.iter().fold(0.0, |a, b| a + b) / n;
    2.0 * p
        .iter()
        .filter(|&&v| v > mean)
        .map(|v| v - mean)
        .fold(0.0, |a, b| a + b)
        / n
}

fn diversity_oracles() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let fixed = [
        mad_diversity(&[2.0, 2.0, 2.0]).ok() == Some(0.0),
        close(mad_diversity(&[1.0, 2.0, 3.0]).unwrap(), 2.0 / 3.0),
        mad_diversity(&[0.0, 10.0]).ok() == Some(5.0),
        vote_diversity(&["A"; 5], &"A").ok() == Some(0.0),
        vote_diversity(&["A", "A", "A", "B", "B"], &"A").ok() == Some(0.4),
        close(vote_diversity(&["A", "B", "C"], &"A").unwrap(), 2.0 / 3.0),
    ];
    if let Some(i) = fixed.iter().position(|ok| !ok) {
        return Err(format!("fixed case {i} failed"));
    }
    let mut r = rng::from_seed(3);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = r.gen_range(2..=20);
        let labels: Vec<u8> = (0..n).map(|_| r.gen_range(0..4)).collect();
        let combined = r.gen_range(0..4u8);
        let mut agree = 0;
        for l in &labels {
            if *l == combined {
                agree += 1;
            }
        }
        let expected = (n - agree) as f64 / n as f64;
        if vote_diversity(&labels, &combined).unwrap() != expected {
            return Err(format!("vote vector {i}: {labels:?}"));
        }
        let reals: Vec<f64> = (0..n).map(|_| r.gen_range(-1e3..1e3)).collect();
        let diff = (mad_diversity(&reals).unwrap() - mad_oracle(&reals)).abs();
        worst = worst.max(diff);
        if diff > 1e-12 {
            return Err(format!("mad vector {i}: difference {diff:e}"));
        }
    }
    Ok(format!(
        "1000 vote vectors exact, 1000 MAD vectors max |diff| {worst:.1e}"
    ))
}

fn monotonicity(tables: &[&ComparisonTable]) -> Outcome {
    let mut r = rng::from_seed(4);
    let programs = [
        (corpus::triangle(), corpus::triangle_spec()),
        (corpus::find_middle(), corpus::find_middle_spec()),
    ];
    let pools: Vec<MutantPool> = programs
        .iter()
        .map(|(p, s)| MutantPool::build(p, &default_probes(s, 0), DEFAULT_CAP, 0))
        .collect();
    for i in 0..100 {
        let k = i % 2;
        let (sut, spec) = &programs[k];
        let size = r.gen_range(1..=40);
        let full = random_suite(spec, sut, size, r.gen()).map_err(|e| e.to_string())?;
        let mut sub = full.clone();
        sub.shuffle(&mut r);
        sub.truncate(r.gen_range(0..=size));
        let (a, b) = (pools[k].score(&sub).kill_count, pools[k].score(&full).kill_count);
        if a > b {
            return Err(format!("pair {i}: sub-suite kills {a} > full {b}"));
        }
    }
    let mut curves = 0;
    for t in tables {
        for run in &t.runs {
            curves += 1;
            if run.curve.windows(2).any(|w| w[0].1 > w[1].1) {
                return Err(format!("curve {} seed {} decreases", run.combo, run.seed));
            }
            if run.curve.last().map(|c| c.1) != Some(run.kill_count) {
                return Err(format!(
                    "curve {} seed {} ends off the final score",
                    run.combo, run.seed
                ));
            }
        }
    }
    Ok(format!(
        "100 suite/sub-suite pairs, {curves} experiment curves non-decreasing"
    ))
}

fn sampler_soundness() -> Outcome {
    let specs = [
        ("triangle", corpus::triangle_spec()),
        ("find_middle", corpus::find_middle_spec()),
    ];
    let branches: Vec<(&SpecSet, &str)> = specs
        .iter()
        .flat_map(|(_, s)| s.branches.iter().map(move |b| (s, b.name.as_str())))
        .collect();
    let mut draws = 0;
    let mut round = 0u64;
    while draws < 1000 {
        for (i, (spec, name)) in branches.iter().enumerate() {
            let seed = rng::derive(round, "acceptance", i as u64);
            let sample = match sample_branch(spec, name, 1, seed) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let branch = spec.branch(name).unwrap();
            for w in &sample.witnesses {
                draws += 1;
                if !spec.in_bounds(w) || !branch.atoms.iter().all(|a| a.holds(w)) {
                    return Err(format!("{name}: witness {w:?} violates the branch"));
                }
            }
        }
        round += 1;
    }
    let mut covered = 0;
    for (label, spec) in &specs {
        let satisfiable: BTreeSet<String> = spec
            .branches
            .iter()
            .filter(|b| sample_branch(spec, &b.name, 1, 0).is_ok())
            .map(|b| b.name.clone())
            .collect();
        let mut seen = BTreeSet::new();
        for t in 1..=10u64 {
            let batch = generate_batch(spec, 20, rng::derive(42, "batch", t)).map_err(|e| e.to_string())?;
            for p in &batch.provenance {
                if let Provenance::Branch(b) = p {
                    seen.insert(b.clone());
                }
            }
        }
        let missing: Vec<&String> = satisfiable.difference(&seen).collect();
        if !missing.is_empty() {
            return Err(format!("{label}: branches missing from 10 batches: {missing:?}"));
        }
        covered += satisfiable.len();
    }
    Ok(format!(
        "{draws} witnesses satisfy their branch; {covered} satisfiable branches all covered"
    ))
}

fn learner_invariants() -> Outcome {
    let mut r = rng::from_seed(6);
    let tri = corpus::triangle();
    let labels: Vec<Value> = tri.class_labels().into_iter().map(Value::Class).collect();

    // Memorization on 50 distinct labeled triples.
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    while rows.len() < 50 {
        let x: Vec<i64> = (0..3).map(|_| r.gen_range(1..=20)).collect();
        if seen.insert(x.clone()) {
            let y = execute(&tri, &x).unwrap();
            rows.push((x, y));
        }
    }
    let data = Dataset::new(Task::Classification(labels.clone()), &rows).map_err(|e| e.to_string())?;
    let w = vec![1.0; data.len()];
    let tree = Tree::fit(
        &TreeParams::default(),
        &Problem {
            x: &data.x,
            y: &data.y,
            w: &w,
        },
        &mut rng::from_seed(0),
    );
    let Targets::Class { labels: ys, .. } = &data.y else {
        unreachable!()
    };
    let correct = data
        .x
        .iter()
        .zip(ys)
        .filter(|(x, &y)| tree.predict(x) == Prediction::Class(y))
        .count();
    if correct != 50 {
        return Err(format!("tree memorized {correct}/50"));
    }

    // AdaBoost sample weights, classification and regression.
    let mut rounds = 0;
    let boosted = [
        (
            EnsembleSpec::new(Method::AdaBoost, BaseLearnerKind::DecisionTree { max_depth: Some(1) }),
            data.clone(),
        ),
        (
            EnsembleSpec::new(
                Method::AdaBoost,
                BaseLearnerKind::LogisticRegression(LogisticParams::default()),
            ),
            data.clone(),
        ),
    ];
    let mid = corpus::find_middle();
    let reg_rows: Vec<(Vec<i64>, Value)> = (0..100)
        .map(|_| {
            let x: Vec<i64> = (0..3).map(|_| r.gen_range(-100..=100)).collect();
            let y = execute(&mid, &x).unwrap();
            (x, y)
        })
        .collect();
    let reg = Dataset::new(Task::Regression, &reg_rows).map_err(|e| e.to_string())?;
    let boosted_reg = [
        EnsembleSpec::new(Method::AdaBoost, BaseLearnerKind::DecisionTree { max_depth: Some(2) }),
        EnsembleSpec::new(Method::AdaBoost, BaseLearnerKind::LinearRegression),
    ];
    let all = boosted
        .into_iter()
        .chain(boosted_reg.into_iter().map(|s| (s, reg.clone())));
    for (spec, d) in all {
        let e = Ensemble::train(&spec, &d, 1).map_err(|e| e.to_string())?;
        for s in &e.trace().sample_weight_sums {
            rounds += 1;
            if (s - 1.0).abs() > 1e-9 {
                return Err(format!("AdaBoost weights sum to {s}"));
            }
        }
    }
    if rounds == 0 {
        return Err("no AdaBoost reweighting round ran".into());
    }

    // Gradient boosting loss per stage.
    let mut stages = 0;
    for (spec, d) in [
        (
            EnsembleSpec::new(Method::GradientBoosting, BaseLearnerKind::tree()).with_members(50),
            &reg,
        ),
        (
            EnsembleSpec::new(Method::GradientBoosting, BaseLearnerKind::tree()).with_members(50),
            &data,
        ),
    ] {
        let e = Ensemble::train(&spec, d, 2).map_err(|e| e.to_string())?;
        let losses = &e.trace().stage_losses;
        stages += losses.len() - 1;
        if let Some(i) = losses.windows(2).position(|w| w[1] > w[0]) {
            return Err(format!(
                "gradient boosting loss rose at stage {}: {:?}",
                i + 1,
                &losses[i..i + 2]
            ));
        }
    }

    // Planted least-squares line.
    let x: Vec<Vec<f64>> = (1..=10).map(|v| vec![v as f64]).collect();
    let y = Targets::Real((1..=10).map(|v| 2.0 * v as f64 + 1.0).collect());
    let w = vec![1.0; 10];
    let lin = LinearRegression::fit(&Problem { x: &x, y: &y, w: &w });
    let err = (lin.coefficients[0] - 2.0).abs().max((lin.intercept - 1.0).abs());
    if err > 1e-9 {
        return Err(format!("linear regression off by {err:e}"));
    }
    Ok(format!(
        "tree 50/50, {rounds} AdaBoost rounds sum to 1, {stages} boosting stages non-increasing, line error {err:.1e}"
    ))
}

fn dir_files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism(first: &Path, second: &Path) -> Outcome {
    let (a, b) = (dir_files(first), dir_files(second));
    if a != b {
        return Err("output file sets differ".into());
    }
    for f in &a {
        if fs::read(first.join(f)).unwrap() != fs::read(second.join(f)).unwrap() {
            return Err(format!("{} differs", f.display()));
        }
    }
    Ok(format!("{} output files byte-identical across two runs", a.len()))
}

fn family_logging(table: &ComparisonTable) -> Outcome {
    let fam = table.pivot_bagging_boosting().map_err(|e| e.to_string())?;
    let get = |f: Family| fam.iter().find(|m| m.family == f).map(|m| m.mean_kills).unwrap();
    let (bag, boost) = (get(Family::Bagging), get(Family::Boosting));
    let verdict = if boost >= bag {
        "boosting >= bagging"
    } else {
        "WARNING: bagging > boosting"
    };
    Ok(format!("bagging mean {bag:.2}, boosting mean {boost:.2}: {verdict}"))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temp dir");
    let tri_a = tmp.path().join("triangle_a");
    let tri_b = tmp.path().join("triangle_b");
    let mid = tmp.path().join("find_middle");

    let triangle = run_config("triangle", &tri_a);
    let triangle_again = run_config("triangle", &tri_b);
    let find_middle = run_config("find_middle", &mid);

    let results: Vec<(u32, &str, Outcome)> = vec![
        (
            1,
            "ELBT beats random on triangle",
            triangle
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|t| beats_random(t, 0.10)),
        ),
        (
            2,
            "ELBT at least random on find_middle",
            find_middle
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|t| beats_random(t, 0.0)),
        ),
        (3, "diversity oracles", diversity_oracles()),
        (
            4,
            "mutation monotonicity",
            match (&triangle, &find_middle) {
                (Ok(t), Ok(m)) => monotonicity(&[t, m]),
                _ => Err("experiment failed".into()),
            },
        ),
        (5, "sampler soundness", sampler_soundness()),
        (6, "learner invariants", learner_invariants()),
        (
            7,
            "experiment determinism",
            match (&triangle, &triangle_again) {
                (Ok(_), Ok(_)) => determinism(&tri_a, &tri_b),
                _ => Err("experiment failed".into()),
            },
        ),
        (8, "program oracles", sut_oracles()),
        (
            9,
            "bagging vs boosting pivot",
            triangle.as_ref().map_err(Clone::clone).and_then(family_logging),
        ),
    ];

    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS [{n}] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{n}] {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
