use std::fs;
use std::path::Path;

use elbt_core::corpus;
use elbt_core::experiment::{run_config, run_experiment, ExperimentConfig, ExperimentError, RANDOM};
use elbt_core::learners::Family;
use elbt_core::mutation::{default_probes, MutantPool};

fn small(dir: &Path) -> ExperimentConfig {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut cfg = ExperimentConfig::new(corpus.join("triangle.sut"), corpus.join("triangle.spec"));
    cfg.combos = vec!["bc-dtc".into(), "gbc".into()];
    cfg.seeds = vec![1, 2];
    cfg.target_suite_size = 17;
    cfg.out_dir = dir.to_path_buf();
    cfg
}

#[test]
fn small_experiment_tables_and_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small(tmp.path());
    let (sut, spec) = cfg.inputs().unwrap();
    let table = run_experiment(&cfg, &sut, &spec).unwrap();
    assert!(table.failures.is_empty());
    assert_eq!(table.runs.len(), 6);
    assert_eq!(table.runs_of(RANDOM).count(), 2);

    let pool = MutantPool::build(&sut, &default_probes(&spec, 0), cfg.mutant_cap, 0);
    assert_eq!(table.pool.fingerprint, pool.fingerprint());
    for run in &table.runs {
        let sizes: Vec<usize> = run.curve.iter().map(|c| c.0).collect();
        assert_eq!(sizes, vec![5, 10, 15, 17]);
        assert!(run.curve.windows(2).all(|w| w[0].1 <= w[1].1));
        assert_eq!(run.curve.last().unwrap().1, pool.score(&run.suite).kill_count);
        assert!(run.kill_count <= table.pool.executable);
    }

    let fam = table.pivot_bagging_boosting().unwrap();
    assert_eq!(fam[0].family, Family::Bagging);
    assert_eq!(fam[0].combos, vec!["bc-dtc".to_string()]);
    assert_eq!(fam[1].combos, vec!["gbc".to_string()]);

    table.write(tmp.path()).unwrap();
    for f in [
        "aggregate.csv",
        "runs.csv",
        "families.csv",
        "base_estimators.csv",
        "pool.meta",
    ] {
        let text = fs::read_to_string(tmp.path().join(f)).unwrap();
        assert!(text.contains(&table.pool.fingerprint), "{f}");
    }
    let aggregate = fs::read_to_string(tmp.path().join("aggregate.csv")).unwrap();
    assert!(aggregate.starts_with("combo,family,mean_kills,std_kills,mean_score,pool_fingerprint\nbc-dtc,bagging,"));
    assert_eq!(aggregate.lines().count(), 4);
    let curve = fs::read_to_string(tmp.path().join("curves/gbc_2.csv")).unwrap();
    assert_eq!(curve.lines().count(), 5);
    assert!(tmp.path().join("curves/random_1.csv").exists());
    assert!(tmp.path().join("suites/bc-dtc_1.csv").exists());
}

#[test]
fn config_file_paths_are_relative_to_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("p.sut"), corpus::FIND_MIDDLE_SUT).unwrap();
    fs::write(tmp.path().join("p.spec"), corpus::FIND_MIDDLE_SPEC).unwrap();
    fs::write(
        tmp.path().join("exp.toml"),
        "sut = \"p.sut\"\nspec = \"p.spec\"\ncombos = [\"rfr\"]\nseeds = [4]\ntarget_suite_size = 10\nout_dir = \"out\"\n",
    )
    .unwrap();
    let table = run_config(&tmp.path().join("exp.toml")).unwrap();
    assert_eq!(table.runs.len(), 2);
    assert!(tmp.path().join("out/curves/rfr_4.csv").exists());
}

#[test]
fn bad_configs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small(tmp.path());
    let (sut, spec) = cfg.inputs().unwrap();
    cfg.combos = vec!["br-dtr".into()];
    assert!(matches!(
        run_experiment(&cfg, &sut, &spec),
        Err(ExperimentError::Config(_))
    ));
    cfg.combos = vec!["nope".into()];
    assert!(matches!(
        run_experiment(&cfg, &sut, &spec),
        Err(ExperimentError::Config(_))
    ));
    assert!(matches!(
        run_config(&tmp.path().join("missing.toml")),
        Err(ExperimentError::Io { .. })
    ));
}

#[test]
fn failed_runs_are_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small(tmp.path());
    cfg.batch_size = 1;
    let (sut, spec) = cfg.inputs().unwrap();
    let table = run_experiment(&cfg, &sut, &spec).unwrap();
    assert_eq!(table.failures.len(), 4);
    assert_eq!(table.runs.len(), 2);
    table.write(tmp.path()).unwrap();
    assert!(tmp.path().join("failures.csv").exists());
}
