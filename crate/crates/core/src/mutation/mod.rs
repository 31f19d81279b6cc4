//! Mutation testing: AST mutants, executability filtering and suite scoring.

mod operators;

use std::fmt;
use std::io::{self, BufRead};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use operators::{diff_paths, expr_at_mut, generate_mutants, Edit, NodePath, OperatorKind};

use crate::lang::{execute, parse, pretty_print, ParseError, Program};
use crate::rng;
use crate::specgen::{random_batch, sample_branch, SpecSet};
use crate::suite::TestCase;

/// Default ceiling on scored mutants.
pub const DEFAULT_CAP: usize = 4000;
/// Random domain points added to the branch witnesses when probing for faults.
pub const DEFAULT_RANDOM_PROBES: usize = 100;
/// Witnesses drawn from each spec branch when probing for faults.
pub const DEFAULT_WITNESSES_PER_BRANCH: usize = 5;

#[derive(Debug, Clone)]
pub struct Mutant {
    pub id: usize,
    pub base: Arc<Program>,
    pub edit: Edit,
    pub program: Program,
}

impl Mutant {
    pub fn is_unmutated(&self) -> bool {
        self.program == *self.base
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutantStatus {
    /// Index of the first test whose outcome differs from its expected value.
    Killed {
        by: usize,
    },
    Survived,
    /// The "mutant" is the original program. Never killable; reported separately.
    Unmutated,
}

impl fmt::Display for MutantStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutantStatus::Killed { .. } => f.write_str("killed"),
            MutantStatus::Survived => f.write_str("survived"),
            MutantStatus::Unmutated => f.write_str("unmutated"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MutationReport {
    pub total_generated: usize,
    pub executable: usize,
    /// `(mutant id, status)` in the order the mutants were given.
    pub statuses: Vec<(usize, MutantStatus)>,
    pub kill_count: usize,
    pub mutation_score: f64,
}

impl MutationReport {
    /// Mutants killed by the first `prefix_len` tests of the scored suite.
    pub fn kills_within(&self, prefix_len: usize) -> usize {
        self.statuses
            .iter()
            .filter(|(_, s)| matches!(s, MutantStatus::Killed { by } if *by < prefix_len))
            .count()
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["mutant_id", "status", "killing_test_index"])?;
        for (id, status) in &self.statuses {
            let by = match status {
                MutantStatus::Killed { by } => by.to_string(),
                _ => String::new(),
            };
            w.write_record([id.to_string(), status.to_string(), by])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Keeps the mutants that return a value (no fault) on every probe input.
pub fn filter_executable(mutants: Vec<Mutant>, probes: &[Vec<i64>]) -> Vec<Mutant> {
    let keep: Vec<bool> = mutants
        .par_iter()
        .map(|m| probes.iter().all(|p| execute(&m.program, p).is_ok()))
        .collect();
    mutants
        .into_iter()
        .zip(keep)
        .filter_map(|(m, k)| k.then_some(m))
        .collect()
}

/// Uniform subsample of at most `cap` mutants, original order preserved.
pub fn cap_mutants(mutants: Vec<Mutant>, cap: usize, seed: u64) -> Vec<Mutant> {
    if mutants.len() <= cap {
        return mutants;
    }
    let mut r = rng::from_seed(rng::derive(seed, "cap", 0));
    let mut picked = rand::seq::index::sample(&mut r, mutants.len(), cap).into_vec();
    picked.sort_unstable();
    let mut slots: Vec<Option<Mutant>> = mutants.into_iter().map(Some).collect();
    picked.into_iter().filter_map(|i| slots[i].take()).collect()
}

fn status_of(mutant: &Mutant, suite: &[TestCase]) -> MutantStatus {
    if mutant.is_unmutated() {
        return MutantStatus::Unmutated;
    }
    for (i, t) in suite.iter().enumerate() {
        match execute(&mutant.program, &t.input) {
            Ok(v) if v == t.expected => {}
            _ => return MutantStatus::Killed { by: i },
        }
    }
    MutantStatus::Survived
}

/// Runs every test against every mutant. A mutant is killed by the first test
/// on which it faults or disagrees with the expected output.
pub fn score_suite(mutants: &[Mutant], suite: &[TestCase]) -> MutationReport {
    let statuses: Vec<(usize, MutantStatus)> = mutants.par_iter().map(|m| (m.id, status_of(m, suite))).collect();
    let kill_count = statuses
        .iter()
        .filter(|(_, s)| matches!(s, MutantStatus::Killed { .. }))
        .count();
    let executable = mutants.len();
    MutationReport {
        total_generated: executable,
        executable,
        statuses,
        kill_count,
        mutation_score: if executable == 0 {
            0.0
        } else {
            kill_count as f64 / executable as f64
        },
    }
}

/// Branch witnesses plus uniform random points, deduplicated.
pub fn default_probes(spec: &SpecSet, seed: u64) -> Vec<Vec<i64>> {
    let mut probes: Vec<Vec<i64>> = Vec::new();
    for (i, b) in spec.branches.iter().enumerate() {
        let s = rng::derive(seed, "probe-branch", i as u64);
        if let Ok(sample) = sample_branch(spec, &b.name, DEFAULT_WITNESSES_PER_BRANCH, s) {
            probes.extend(sample.witnesses);
        }
    }
    probes.extend(random_batch(spec, DEFAULT_RANDOM_PROBES, rng::derive(seed, "probe-random", 0)).inputs);
    let mut seen = std::collections::HashSet::new();
    probes.retain(|p| seen.insert(p.clone()));
    probes
}

/// The shared mutant pool of an experiment: generated, filtered, capped.
#[derive(Debug, Clone)]
pub struct MutantPool {
    pub generated: usize,
    pub executable: usize,
    pub mutants: Vec<Mutant>,
}

impl MutantPool {
    pub fn build(program: &Program, probes: &[Vec<i64>], cap: usize, seed: u64) -> MutantPool {
        let all = generate_mutants(program);
        let generated = all.len();
        let executable = filter_executable(all, probes);
        let n_exec = executable.len();
        MutantPool {
            generated,
            executable: n_exec,
            mutants: cap_mutants(executable, cap, seed),
        }
    }

    pub fn capped(&self) -> usize {
        self.mutants.len()
    }

    pub fn score(&self, suite: &[TestCase]) -> MutationReport {
        let mut report = score_suite(&self.mutants, suite);
        report.total_generated = self.generated;
        report
    }

    /// Short hex digest over the ids and sources of the scored mutants.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for m in &self.mutants {
            h.update((m.id as u64).to_le_bytes());
            h.update(pretty_print(&m.program).as_bytes());
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// One line of `mutants.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub id: usize,
    pub node_path: String,
    pub operator: String,
    pub original: String,
    pub replacement: String,
    pub source: String,
}

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: mutant source: {source}")]
    Source { line: usize, source: ParseError },
    #[error("line {line}: {msg}")]
    Invalid { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<&Mutant> for MutantRecord {
    fn from(m: &Mutant) -> Self {
        MutantRecord {
            id: m.id,
            node_path: m.edit.path.to_string(),
            operator: m.edit.operator.code().to_string(),
            original: m.edit.original.clone(),
            replacement: m.edit.replacement.clone(),
            source: pretty_print(&m.program),
        }
    }
}

pub fn write_mutants_jsonl<W: io::Write>(mut writer: W, mutants: &[Mutant]) -> io::Result<()> {
    for m in mutants {
        let line = serde_json::to_string(&MutantRecord::from(m)).map_err(io::Error::other)?;
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Parses one JSONL record into a mutant of `base`.
pub fn mutant_from_record(base: &Arc<Program>, rec: MutantRecord, line: usize) -> Result<Mutant, RecordError> {
    let program = parse(&rec.source).map_err(|source| RecordError::Source { line, source })?;
    let operator = OperatorKind::from_code(&rec.operator).ok_or_else(|| RecordError::Invalid {
        line,
        msg: format!("unknown operator {:?}", rec.operator),
    })?;
    let path = rec.node_path.parse().map_err(|_| RecordError::Invalid {
        line,
        msg: format!("bad node path {:?}", rec.node_path),
    })?;
    Ok(Mutant {
        id: rec.id,
        base: Arc::clone(base),
        edit: Edit {
            path,
            operator,
            original: rec.original,
            replacement: rec.replacement,
        },
        program,
    })
}

pub fn read_mutants_jsonl<R: BufRead>(reader: R, base: &Program) -> Result<Vec<Mutant>, RecordError> {
    let base = Arc::new(base.clone());
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: MutantRecord =
            serde_json::from_str(&line).map_err(|source| RecordError::Json { line: i + 1, source })?;
        out.push(mutant_from_record(&base, rec, i + 1)?);
    }
    Ok(out)
}
