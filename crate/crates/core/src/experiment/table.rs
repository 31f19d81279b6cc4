use std::fs;
use std::io;
use std::path::Path;

use super::{ExperimentError, RANDOM};
use crate::learners::{parse_combo, BaseEstimator, Family, Method};
use crate::suite::{write_suite_csv, TestCase};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolMeta {
    pub generated: usize,
    pub executable: usize,
    pub capped: usize,
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Combination code, or `"random"` for the baseline.
    pub combo: String,
    pub seed: u64,
    pub kill_count: usize,
    pub mutation_score: f64,
    /// `(suite size, kills)` at each checkpoint.
    pub curve: Vec<(usize, usize)>,
    pub suite: Vec<TestCase>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunFailure {
    pub combo: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub combo: String,
    /// `bagging`, `boosting` or `baseline`.
    pub family: String,
    pub runs: usize,
    pub mean_kills: f64,
    pub std_kills: f64,
    pub mean_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMean {
    pub family: Family,
    pub combos: Vec<String>,
    /// Mean over the family's combos of each combo's mean kill count.
    pub mean_kills: f64,
    pub mean_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseEstimatorRow {
    pub base: String,
    pub bagging_mean_kills: Option<f64>,
    pub boosting_mean_kills: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub classification: bool,
    /// Combination codes in run order.
    pub combos: Vec<String>,
    pub pool: PoolMeta,
    pub runs: Vec<RunResult>,
    pub failures: Vec<RunFailure>,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Sample standard deviation; 0 for fewer than two values.
fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

impl ComparisonTable {
    pub fn runs_of<'a>(&'a self, combo: &'a str) -> impl Iterator<Item = &'a RunResult> + 'a {
        self.runs.iter().filter(move |r| r.combo == combo)
    }

    pub fn mean_kills(&self, combo: &str) -> f64 {
        let k: Vec<f64> = self.runs_of(combo).map(|r| r.kill_count as f64).collect();
        mean(&k)
    }

    fn row(&self, combo: &str, family: String) -> AggregateRow {
        let kills: Vec<f64> = self.runs_of(combo).map(|r| r.kill_count as f64).collect();
        let scores: Vec<f64> = self.runs_of(combo).map(|r| r.mutation_score).collect();
        AggregateRow {
            combo: combo.to_string(),
            family,
            runs: kills.len(),
            mean_kills: mean(&kills),
            std_kills: std_dev(&kills),
            mean_score: mean(&scores),
        }
    }

    /// One row per combination in run order, then the random baseline.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut rows: Vec<AggregateRow> = self
            .combos
            .iter()
            .map(|c| {
                let family = parse_combo(c).map_or("unknown".to_string(), |k| k.family.to_string());
                self.row(c, family)
            })
            .collect();
        rows.push(self.row(RANDOM, "baseline".into()));
        rows
    }

    /// Family means of the combinations, bagging first.
    pub fn pivot_bagging_boosting(&self) -> Result<Vec<FamilyMean>, ExperimentError> {
        let mut out = Vec::new();
        for family in [Family::Bagging, Family::Boosting] {
            let mut members = Vec::new();
            for code in &self.combos {
                let combo =
                    parse_combo(code).ok_or_else(|| ExperimentError::Config(format!("unknown combo {code:?}")))?;
                if combo.family == family {
                    members.push(self.row(code, family.to_string()));
                }
            }
            let kills: Vec<f64> = members.iter().map(|r| r.mean_kills).collect();
            let scores: Vec<f64> = members.iter().map(|r| r.mean_score).collect();
            out.push(FamilyMean {
                family,
                combos: members.into_iter().map(|r| r.combo).collect(),
                mean_kills: mean(&kills),
                mean_score: mean(&scores),
            });
        }
        Ok(out)
    }

    /// Mean kills of each explicit base estimator under bagging and under AdaBoost.
    pub fn pivot_base_estimators(&self) -> Vec<BaseEstimatorRow> {
        [
            BaseEstimator::DecisionTree,
            BaseEstimator::Linear,
            BaseEstimator::RandomForest,
        ]
        .into_iter()
        .map(|base| {
            let lookup = |method: Method| {
                self.combos
                    .iter()
                    .filter_map(|c| parse_combo(c))
                    .find(|c| c.base == Some(base) && c.method == method)
                    .map(|c| self.mean_kills(c.code))
            };
            BaseEstimatorRow {
                base: base.name(self.classification).to_string(),
                bagging_mean_kills: lookup(Method::Bagging),
                boosting_mean_kills: lookup(Method::AdaBoost),
            }
        })
        .collect()
    }

    /// Writes `aggregate.csv`, `runs.csv`, `families.csv`,
    /// `base_estimators.csv`, `pool.meta`, `curves/<combo>_<seed>.csv` and
    /// `suites/<combo>_<seed>.csv` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), ExperimentError> {
        fs::create_dir_all(dir.join("curves"))?;
        fs::create_dir_all(dir.join("suites"))?;
        let fp = &self.pool.fingerprint;

        fs::write(
            dir.join("pool.meta"),
            format!(
                "generated={}\nexecutable={}\ncapped={}\nfingerprint={}\n",
                self.pool.generated, self.pool.executable, self.pool.capped, fp
            ),
        )?;

        let mut w = csv_file(&dir.join("aggregate.csv"))?;
        w.write_record([
            "combo",
            "family",
            "mean_kills",
            "std_kills",
            "mean_score",
            "pool_fingerprint",
        ])?;
        for r in self.aggregate() {
            w.write_record([
                r.combo,
                r.family,
                format!("{:.4}", r.mean_kills),
                format!("{:.4}", r.std_kills),
                format!("{:.6}", r.mean_score),
                fp.clone(),
            ])?;
        }
        w.flush()?;

        let mut w = csv_file(&dir.join("runs.csv"))?;
        w.write_record(["combo", "seed", "kill_count", "mutation_score", "pool_fingerprint"])?;
        for r in &self.runs {
            w.write_record([
                r.combo.clone(),
                r.seed.to_string(),
                r.kill_count.to_string(),
                format!("{:.6}", r.mutation_score),
                fp.clone(),
            ])?;
        }
        w.flush()?;

        let mut w = csv_file(&dir.join("families.csv"))?;
        w.write_record(["family", "combos", "mean_kills", "mean_score", "pool_fingerprint"])?;
        for f in self.pivot_bagging_boosting()? {
            w.write_record([
                f.family.to_string(),
                f.combos.join(" "),
                format!("{:.4}", f.mean_kills),
                format!("{:.6}", f.mean_score),
                fp.clone(),
            ])?;
        }
        w.flush()?;

        let mut w = csv_file(&dir.join("base_estimators.csv"))?;
        w.write_record(["base", "bagging_mean_kills", "boosting_mean_kills", "pool_fingerprint"])?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.4}"));
        for r in self.pivot_base_estimators() {
            w.write_record([
                r.base,
                opt(r.bagging_mean_kills),
                opt(r.boosting_mean_kills),
                fp.clone(),
            ])?;
        }
        w.flush()?;

        for r in &self.runs {
            let name = format!("{}_{}.csv", r.combo, r.seed);
            let mut w = csv_file(&dir.join("curves").join(&name))?;
            w.write_record(["suite_size", "kills", "mutation_score", "pool_fingerprint"])?;
            for &(size, kills) in &r.curve {
                let score = if self.pool.capped == 0 {
                    0.0
                } else {
                    kills as f64 / self.pool.capped as f64
                };
                w.write_record([size.to_string(), kills.to_string(), format!("{score:.6}"), fp.clone()])?;
            }
            w.flush()?;
            let file = fs::File::create(dir.join("suites").join(&name))?;
            write_suite_csv(io::BufWriter::new(file), &r.suite).map_err(|e| io::Error::other(e.to_string()))?;
        }

        if !self.failures.is_empty() {
            let mut w = csv_file(&dir.join("failures.csv"))?;
            w.write_record(["combo", "seed", "error"])?;
            for f in &self.failures {
                w.write_record([f.combo.clone(), f.seed.to_string(), f.message.clone()])?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

fn csv_file(path: &Path) -> Result<csv::Writer<fs::File>, ExperimentError> {
    Ok(csv::Writer::from_writer(fs::File::create(path)?))
}
