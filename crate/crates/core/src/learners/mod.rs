//! Base learners and ensemble constructors.
//!
//! Every learner fits a weighted [`Problem`]; bootstrap resamples are
//! expressed as integer row weights, so a member trained on a resample sees
//! exactly the multiset it was drawn.

mod combo;
mod ensemble;
mod linear;
mod tree;

pub use combo::{parse_combo, BaseEstimator, Combo, Family, CLASSIFICATION_COMBOS, REGRESSION_COMBOS};
pub use ensemble::{combine, samme_weight, Ensemble, TrainTrace};
pub use linear::{LinearRegression, LogisticParams, LogisticRegression};
pub use tree::{Tree, TreeParams};

use crate::lang::Value;
use crate::suite::TestCase;

/// Inner forest size when a forest is the base learner of another ensemble.
pub const NESTED_FOREST_SIZE: usize = 5;
pub const DEFAULT_MEMBERS: usize = 10;
pub const DEFAULT_LEARNING_RATE: f64 = 0.1;
/// Depth of gradient-boosting regression trees.
pub const BOOSTING_TREE_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    Class { labels: Vec<usize>, n_classes: usize },
    Real(Vec<f64>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Class { labels, .. } => labels.len(),
            Targets::Real(y) => y.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A weighted training problem borrowed from a [`Dataset`].
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub x: &'a [Vec<f64>],
    pub y: &'a Targets,
    pub w: &'a [f64],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction {
    /// Index into the dataset's label set.
    Class(usize),
    Real(f64),
}

impl Prediction {
    pub fn as_real(self) -> f64 {
        match self {
            Prediction::Real(v) => v,
            Prediction::Class(c) => c as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    /// Label set in ascending order; prediction ties resolve to the smaller label.
    Classification(Vec<Value>),
    Regression,
}

impl Task {
    pub fn is_classification(&self) -> bool {
        matches!(self, Task::Classification(_))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnError {
    #[error("empty dataset")]
    Empty,
    #[error("feature vectors have inconsistent lengths")]
    Ragged,
    #[error("target {0} is not in the label set")]
    UnknownLabel(String),
    #[error("regression target {0} is not numeric")]
    NonNumeric(String),
    #[error("{learner} cannot be used for {task}")]
    IncompatibleTask { learner: &'static str, task: &'static str },
    #[error("ensembles need at least 2 members")]
    TooFewMembers,
    #[error("input has {got} features, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub task: Task,
    pub x: Vec<Vec<f64>>,
    pub y: Targets,
}

impl Dataset {
    pub fn new(task: Task, rows: &[(Vec<i64>, Value)]) -> Result<Dataset, LearnError> {
        let first = rows.first().ok_or(LearnError::Empty)?;
        let d = first.0.len();
        if rows.iter().any(|(x, _)| x.len() != d) {
            return Err(LearnError::Ragged);
        }
        let x = rows
            .iter()
            .map(|(x, _)| x.iter().map(|&v| v as f64).collect())
            .collect();
        let y = match &task {
            Task::Classification(set) => {
                let labels = rows
                    .iter()
                    .map(|(_, v)| {
                        set.binary_search(v)
                            .map_err(|_| LearnError::UnknownLabel(v.to_string()))
                    })
                    .collect::<Result<_, _>>()?;
                Targets::Class {
                    labels,
                    n_classes: set.len(),
                }
            }
            Task::Regression => Targets::Real(
                rows.iter()
                    .map(|(_, v)| match v {
                        Value::Int(n) => Ok(*n as f64),
                        other => Err(LearnError::NonNumeric(other.to_string())),
                    })
                    .collect::<Result<_, _>>()?,
            ),
        };
        Ok(Dataset { task, x, y })
    }

    pub fn from_suite(task: Task, suite: &[TestCase]) -> Result<Dataset, LearnError> {
        let rows: Vec<(Vec<i64>, Value)> = suite.iter().map(|t| (t.input.clone(), t.expected.clone())).collect();
        Dataset::new(task, &rows)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    /// Maps a prediction back to a program value. Regression predictions are
    /// not rounded.
    pub fn value_of(&self, p: Prediction) -> Option<Value> {
        match (&self.task, p) {
            (Task::Classification(set), Prediction::Class(c)) => set.get(c).cloned(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bagging,
    RandomForest,
    ExtraTrees,
    AdaBoost,
    GradientBoosting,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseLearnerKind {
    DecisionTree { max_depth: Option<usize> },
    LogisticRegression(LogisticParams),
    LinearRegression,
    Ensemble(Box<EnsembleSpec>),
}

impl BaseLearnerKind {
    pub fn tree() -> BaseLearnerKind {
        BaseLearnerKind::DecisionTree { max_depth: None }
    }

    fn check(&self, task: &Task) -> Result<(), LearnError> {
        match (self, task) {
            (BaseLearnerKind::LogisticRegression(_), Task::Regression) => Err(LearnError::IncompatibleTask {
                learner: "logistic regression",
                task: "regression",
            }),
            (BaseLearnerKind::LinearRegression, Task::Classification(_)) => Err(LearnError::IncompatibleTask {
                learner: "linear regression",
                task: "classification",
            }),
            (BaseLearnerKind::Ensemble(inner), _) => inner.check(task),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub method: Method,
    pub base: BaseLearnerKind,
    pub n_members: usize,
    /// Shrinkage for gradient boosting.
    pub learning_rate: f64,
    /// Features tried per split for random forests; `None` picks `floor(sqrt(d))`.
    pub max_features: Option<usize>,
}

impl EnsembleSpec {
    pub fn new(method: Method, base: BaseLearnerKind) -> EnsembleSpec {
        let base = match method {
            Method::RandomForest | Method::ExtraTrees => BaseLearnerKind::tree(),
            Method::GradientBoosting => BaseLearnerKind::DecisionTree {
                max_depth: Some(BOOSTING_TREE_DEPTH),
            },
            _ => base,
        };
        EnsembleSpec {
            method,
            base,
            n_members: DEFAULT_MEMBERS,
            learning_rate: DEFAULT_LEARNING_RATE,
            max_features: None,
        }
    }

    pub fn with_members(mut self, n: usize) -> EnsembleSpec {
        self.n_members = n;
        self
    }

    pub fn check(&self, task: &Task) -> Result<(), LearnError> {
        if self.n_members < 2 {
            return Err(LearnError::TooFewMembers);
        }
        self.base.check(task)
    }
}
