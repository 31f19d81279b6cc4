//! Comparison experiments: every ensemble combination and a random baseline,
//! over several seeds, graded against one shared mutant pool.

mod table;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

pub use table::{AggregateRow, BaseEstimatorRow, ComparisonTable, FamilyMean, PoolMeta, RunFailure, RunResult};

use crate::engine::{self, task_for, EngineError, LbtConfig};
use crate::lang::{parse, ParseError, Program};
use crate::learners::{parse_combo, CLASSIFICATION_COMBOS, REGRESSION_COMBOS};
use crate::mutation::{default_probes, MutantPool, DEFAULT_CAP};
use crate::specgen::{SpecError, SpecSet};
use crate::suite::TestCase;

/// Combo name used for the random baseline rows.
pub const RANDOM: &str = "random";
pub const DEFAULT_CHECKPOINT: usize = 5;
pub const DEFAULT_SEEDS: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config: {0}")]
    Config(String),
    #[error("program: {0}")]
    Program(#[from] ParseError),
    #[error("spec: {0}")]
    Spec(#[from] SpecError),
    #[error("writing outputs: {0}")]
    Output(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Program and spec paths, relative to the config file.
    pub sut: PathBuf,
    pub spec: PathBuf,
    /// Defaults to the nine combinations matching the program's task.
    #[serde(default)]
    pub combos: Vec<String>,
    /// Defaults to `1..=10`.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "defaults::seed_suite")]
    pub seed_suite_size: usize,
    #[serde(default = "defaults::batch")]
    pub batch_size: usize,
    #[serde(default = "defaults::target")]
    pub target_suite_size: usize,
    #[serde(default = "defaults::members")]
    pub n_members: usize,
    #[serde(default = "defaults::cap")]
    pub mutant_cap: usize,
    #[serde(default)]
    pub pool_seed: u64,
    #[serde(default = "defaults::checkpoint")]
    pub checkpoint: usize,
    #[serde(default = "defaults::out_dir")]
    pub out_dir: PathBuf,
}

mod defaults {
    use std::path::PathBuf;

    pub fn seed_suite() -> usize {
        crate::engine::DEFAULT_SEED_SUITE
    }
    pub fn batch() -> usize {
        crate::engine::DEFAULT_BATCH
    }
    pub fn target() -> usize {
        crate::engine::DEFAULT_TARGET
    }
    pub fn members() -> usize {
        crate::learners::DEFAULT_MEMBERS
    }
    pub fn cap() -> usize {
        crate::mutation::DEFAULT_CAP
    }
    pub fn checkpoint() -> usize {
        super::DEFAULT_CHECKPOINT
    }
    pub fn out_dir() -> PathBuf {
        PathBuf::from("results")
    }
}

impl ExperimentConfig {
    /// A config with every field at its default.
    pub fn new(sut: impl Into<PathBuf>, spec: impl Into<PathBuf>) -> ExperimentConfig {
        ExperimentConfig {
            sut: sut.into(),
            spec: spec.into(),
            combos: Vec::new(),
            seeds: Vec::new(),
            seed_suite_size: defaults::seed_suite(),
            batch_size: defaults::batch(),
            target_suite_size: defaults::target(),
            n_members: defaults::members(),
            mutant_cap: DEFAULT_CAP,
            pool_seed: 0,
            checkpoint: DEFAULT_CHECKPOINT,
            out_dir: defaults::out_dir(),
        }
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.message().to_string()))
    }

    /// Loads a config file and resolves its relative paths against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
        let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = ExperimentConfig::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.sut, &mut cfg.spec, &mut cfg.out_dir] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            (1..=DEFAULT_SEEDS as u64).collect()
        } else {
            self.seeds.clone()
        }
    }

    fn read(path: &Path) -> Result<String, ExperimentError> {
        fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Parses the program and spec named by the config.
    pub fn inputs(&self) -> Result<(Program, SpecSet), ExperimentError> {
        let sut = parse(&Self::read(&self.sut)?)?;
        let spec = SpecSet::parse(&Self::read(&self.spec)?)?;
        Ok((sut, spec))
    }
}

/// Checkpoint suite sizes: every `step` cases, plus the final size.
pub fn checkpoints(target: usize, step: usize) -> Vec<usize> {
    let step = step.max(1);
    let mut sizes: Vec<usize> = (1..).map(|k| k * step).take_while(|&s| s < target).collect();
    sizes.push(target);
    sizes
}

/// Runs every (combo, seed) pair and the per-seed random baseline against one
/// mutant pool. Failed runs are recorded in the table rather than aborting
/// the experiment.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    sut: &Program,
    spec: &SpecSet,
) -> Result<ComparisonTable, ExperimentError> {
    let task = task_for(sut);
    let defaults: &[&str] = if task.is_classification() {
        &CLASSIFICATION_COMBOS
    } else {
        &REGRESSION_COMBOS
    };
    let codes: Vec<String> = if cfg.combos.is_empty() {
        defaults.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.combos.clone()
    };
    let mut combos = Vec::with_capacity(codes.len());
    for code in &codes {
        let combo = parse_combo(code).ok_or_else(|| ExperimentError::Config(format!("unknown combo {code:?}")))?;
        if combo.classification != task.is_classification() {
            return Err(ExperimentError::Config(format!(
                "combo {code} does not fit the program's output type"
            )));
        }
        combos.push(combo);
    }
    let seeds = cfg.seeds();
    if combos.is_empty() || seeds.is_empty() {
        return Err(ExperimentError::Config("need at least one combo and one seed".into()));
    }

    let probes = default_probes(spec, cfg.pool_seed);
    let pool = MutantPool::build(sut, &probes, cfg.mutant_cap, cfg.pool_seed);
    let sizes = checkpoints(cfg.target_suite_size, cfg.checkpoint);

    let mut jobs: Vec<(Option<usize>, u64)> = Vec::new();
    for (i, _) in combos.iter().enumerate() {
        jobs.extend(seeds.iter().map(|&s| (Some(i), s)));
    }
    jobs.extend(seeds.iter().map(|&s| (None, s)));

    let outcomes: Vec<Result<RunResult, RunFailure>> = jobs
        .par_iter()
        .map(|&(ci, seed)| {
            let name = ci.map_or(RANDOM.to_string(), |i| combos[i].code.to_string());
            let suite: Result<Vec<TestCase>, EngineError> = match ci {
                Some(i) => {
                    let mut spec_i = combos[i].spec();
                    spec_i.n_members = cfg.n_members;
                    let lbt = LbtConfig {
                        seed_suite_size: cfg.seed_suite_size,
                        batch_size: cfg.batch_size,
                        target_suite_size: cfg.target_suite_size,
                        ensemble: spec_i,
                        seed,
                    };
                    engine::run(&lbt, spec, sut).map(|(suite, _)| suite)
                }
                None => engine::random_suite(spec, sut, cfg.target_suite_size, seed),
            };
            match suite {
                Ok(suite) => {
                    let report = pool.score(&suite);
                    let curve = sizes
                        .iter()
                        .filter(|&&s| s <= suite.len())
                        .map(|&s| (s, report.kills_within(s)))
                        .collect();
                    Ok(RunResult {
                        combo: name,
                        seed,
                        kill_count: report.kill_count,
                        mutation_score: report.mutation_score,
                        curve,
                        suite,
                    })
                }
                Err(e) => Err(RunFailure {
                    combo: name,
                    seed,
                    message: e.to_string(),
                }),
            }
        })
        .collect();

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => runs.push(r),
            Err(f) => failures.push(f),
        }
    }
    Ok(ComparisonTable {
        classification: task.is_classification(),
        combos: codes,
        pool: PoolMeta {
            generated: pool.generated,
            executable: pool.executable,
            capped: pool.capped(),
            fingerprint: pool.fingerprint(),
        },
        runs,
        failures,
    })
}

/// Loads, runs and writes an experiment. Outputs go to the config's
/// `out_dir`.
pub fn run_config(path: &Path) -> Result<ComparisonTable, ExperimentError> {
    let cfg = ExperimentConfig::load(path)?;
    let (sut, spec) = cfg.inputs()?;
    let table = run_experiment(&cfg, &sut, &spec)?;
    table.write(&cfg.out_dir)?;
    Ok(table)
}
