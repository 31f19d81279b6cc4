//! The selection loop: train a committee on the suite so far, score a batch
//! of spec-derived candidates by disagreement, run the program on the winner,
//! repeat until the suite reaches its target size.

use std::collections::HashSet;
use std::io;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::diversity::{self, select_max_utility, DiversityError, UtilityScore};
use crate::lang::{execute, Fault, Program, Value};
use crate::learners::{Dataset, Ensemble, EnsembleSpec, LearnError, Task};
use crate::rng;
use crate::specgen::{generate_batch, random_batch, CandidateBatch, SpecError, SpecSet};
use crate::suite::TestCase;

pub const DEFAULT_SEED_SUITE: usize = 6;
pub const DEFAULT_BATCH: usize = 20;
pub const DEFAULT_TARGET: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct LbtConfig {
    pub seed_suite_size: usize,
    pub batch_size: usize,
    pub target_suite_size: usize,
    pub ensemble: EnsembleSpec,
    pub seed: u64,
}

impl LbtConfig {
    pub fn new(ensemble: EnsembleSpec, seed: u64) -> LbtConfig {
        LbtConfig {
            seed_suite_size: DEFAULT_SEED_SUITE,
            batch_size: DEFAULT_BATCH,
            target_suite_size: DEFAULT_TARGET,
            ensemble,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.seed_suite_size < 2 {
            return Err(EngineError::Config("seed suite needs at least 2 cases".into()));
        }
        if self.target_suite_size <= self.seed_suite_size {
            return Err(EngineError::Config(
                "target size must exceed the seed suite size".into(),
            ));
        }
        if self.batch_size < 2 {
            return Err(EngineError::Config("batch size must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("the program faults on input {input:?}: {fault}")]
    Fault { input: Vec<i64>, fault: Fault },
    #[error("spec yields only {found} distinct inputs, {wanted} needed")]
    Exhausted { found: usize, wanted: usize },
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Diversity(#[from] DiversityError),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Candidates left after dropping inputs already in the suite.
    pub candidates: usize,
    pub max_utility: f64,
    pub selected_input: Vec<i64>,
    /// Suite size after appending the selection.
    pub suite_size: usize,
    pub training_size: usize,
    /// [`suite_fingerprint`] of the cases the committee was trained on.
    pub training_fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
}

impl RunTrace {
    /// Columns `iteration,candidates,max_utility,selected_input,suite_size`;
    /// the input is space separated.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["iteration", "candidates", "max_utility", "selected_input", "suite_size"])?;
        for r in &self.records {
            let input: Vec<String> = r.selected_input.iter().map(i64::to_string).collect();
            w.write_record([
                r.iteration.to_string(),
                r.candidates.to_string(),
                format!("{:.6}", r.max_utility),
                input.join(" "),
                r.suite_size.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Classification over the program's class literals when it has any,
/// regression otherwise.
pub fn task_for(program: &Program) -> Task {
    let labels = program.class_labels();
    if labels.is_empty() {
        Task::Regression
    } else {
        Task::Classification(labels.into_iter().map(Value::Class).collect())
    }
}

/// Short hex digest of a suite's inputs and expected outputs, in order.
pub fn suite_fingerprint(suite: &[TestCase]) -> String {
    let mut h = Sha256::new();
    for t in suite {
        for v in &t.input {
            h.update(v.to_le_bytes());
        }
        h.update(t.expected.to_string().as_bytes());
        h.update([0]);
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn label(sut: &Program, input: Vec<i64>, iteration: usize, utility: f64) -> Result<TestCase, EngineError> {
    match execute(sut, &input) {
        Ok(expected) => Ok(TestCase {
            input,
            expected,
            iteration,
            utility_at_selection: utility,
        }),
        Err(fault) => Err(EngineError::Fault { input, fault }),
    }
}

/// `k` distinct spec-derived inputs labeled by the program, iteration 0.
pub fn seed_suite(spec: &SpecSet, sut: &Program, k: usize, seed: u64) -> Result<Vec<TestCase>, EngineError> {
    let batch = generate_batch(spec, k, rng::derive(seed, "seed-suite", 0))?;
    if batch.len() < k {
        return Err(EngineError::Exhausted {
            found: batch.len(),
            wanted: k,
        });
    }
    batch.inputs.into_iter().map(|x| label(sut, x, 0, 0.0)).collect()
}

fn fresh_candidates(batch: CandidateBatch, known: &HashSet<Vec<i64>>) -> CandidateBatch {
    let (inputs, provenance) = batch
        .inputs
        .into_iter()
        .zip(batch.provenance)
        .filter(|(x, _)| !known.contains(x))
        .unzip();
    CandidateBatch { inputs, provenance }
}

pub fn run(config: &LbtConfig, spec: &SpecSet, sut: &Program) -> Result<(Vec<TestCase>, RunTrace), EngineError> {
    config.validate()?;
    let task = task_for(sut);
    config.ensemble.check(&task)?;
    let seed = config.seed;
    let mut suite = seed_suite(spec, sut, config.seed_suite_size, seed)?;
    let mut known: HashSet<Vec<i64>> = suite.iter().map(|t| t.input.clone()).collect();
    let mut trace = RunTrace::default();

    for t in 1..=config.target_suite_size - config.seed_suite_size {
        let data = Dataset::from_suite(task.clone(), &suite)?;
        let ensemble = Ensemble::train(&config.ensemble, &data, rng::derive(seed, "train", t as u64))?;

        let mut batch = fresh_candidates(
            generate_batch(spec, config.batch_size, rng::derive(seed, "batch", t as u64))?,
            &known,
        );
        if batch.is_empty() {
            batch = fresh_candidates(
                generate_batch(spec, config.batch_size, rng::derive(seed, "batch-retry", t as u64))?,
                &known,
            );
        }
        let scores: Vec<UtilityScore> = batch
            .inputs
            .par_iter()
            .zip(batch.provenance.par_iter())
            .map(|(x, p)| {
                Ok(UtilityScore {
                    input: x.clone(),
                    d: diversity::utility(&ensemble, x)?,
                    provenance: p.clone(),
                })
            })
            .collect::<Result<_, DiversityError>>()?;
        let pick = select_max_utility(&scores, &known, rng::derive(seed, "select", t as u64))?;
        let chosen = &scores[pick];

        trace.records.push(IterationRecord {
            iteration: t,
            candidates: scores.len(),
            max_utility: chosen.d,
            selected_input: chosen.input.clone(),
            suite_size: suite.len() + 1,
            training_size: suite.len(),
            training_fingerprint: suite_fingerprint(&suite),
        });
        known.insert(chosen.input.clone());
        suite.push(label(sut, chosen.input.clone(), t, chosen.d)?);
    }
    Ok((suite, trace))
}

/// `size` distinct uniform in-bounds inputs labeled by the program.
pub fn random_suite(spec: &SpecSet, sut: &Program, size: usize, seed: u64) -> Result<Vec<TestCase>, EngineError> {
    random_batch(spec, size, rng::derive(seed, "random-suite", 0))
        .inputs
        .into_iter()
        .map(|x| label(sut, x, 0, 0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::learners::parse_combo;

    #[test]
    fn config_validation() {
        let spec = parse_combo("bc-dtc").unwrap().spec();
        let mut c = LbtConfig::new(spec, 1);
        assert!(c.validate().is_ok());
        c.target_suite_size = 6;
        assert!(c.validate().is_err());
        c.target_suite_size = 50;
        c.seed_suite_size = 1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn seed_suite_labels_match_program() {
        let (sut, spec) = (corpus::triangle(), corpus::triangle_spec());
        let s = seed_suite(&spec, &sut, 6, 3).unwrap();
        assert_eq!(s.len(), 6);
        for t in &s {
            assert_eq!(execute(&sut, &t.input).unwrap(), t.expected);
            assert_eq!(t.iteration, 0);
        }
    }

    #[test]
    fn short_run_shape() {
        let (sut, spec) = (corpus::triangle(), corpus::triangle_spec());
        let mut c = LbtConfig::new(parse_combo("rfc").unwrap().spec(), 5);
        c.target_suite_size = 12;
        let (suite, trace) = run(&c, &spec, &sut).unwrap();
        assert_eq!(suite.len(), 12);
        assert_eq!(trace.records.len(), 6);
        let sizes: Vec<usize> = trace.records.iter().map(|r| r.suite_size).collect();
        assert_eq!(sizes, (7..=12).collect::<Vec<_>>());
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("iteration,candidates,max_utility,selected_input,suite_size\n1,"));
    }
}
