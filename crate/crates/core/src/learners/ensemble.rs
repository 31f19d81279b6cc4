//! Bagging, random forests, extra trees, AdaBoost (SAMME / R2) and gradient
//! boosting over the base learners.

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rayon::prelude::*;

use super::tree::argmax;
use super::{
    BaseLearnerKind, Dataset, EnsembleSpec, LearnError, LinearRegression, LogisticRegression, Method, Prediction,
    Problem, Targets, Tree, TreeParams,
};
use crate::rng::{self, Rng};

/// Diagnostics recorded while training.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    /// Size of each member's bootstrap multiset.
    pub bootstrap_sizes: Vec<usize>,
    /// Distinct rows in each member's bootstrap multiset.
    pub bootstrap_distinct: Vec<usize>,
    /// AdaBoost: sum of the sample weights after each reweighting round.
    pub sample_weight_sums: Vec<f64>,
    /// AdaBoost: weighted error of each fitted member, including a rejected final one.
    pub member_errors: Vec<f64>,
    /// Gradient boosting: weighted training loss before the first stage and after each stage.
    pub stage_losses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Model {
    Tree(Tree),
    Logistic(LogisticRegression),
    Linear(LinearRegression),
    Nested(Box<Ensemble>),
}

impl Model {
    fn fit(kind: &BaseLearnerKind, p: &Problem, seed: u64) -> Model {
        match kind {
            BaseLearnerKind::DecisionTree { max_depth } => {
                let params = TreeParams {
                    max_depth: *max_depth,
                    ..TreeParams::default()
                };
                Model::Tree(Tree::fit(&params, p, &mut rng::from_seed(seed)))
            }
            BaseLearnerKind::LogisticRegression(params) => Model::Logistic(LogisticRegression::fit(params, p)),
            BaseLearnerKind::LinearRegression => Model::Linear(LinearRegression::fit(p)),
            BaseLearnerKind::Ensemble(spec) => Model::Nested(Box::new(Ensemble::fit(spec, p, seed))),
        }
    }

    fn predict(&self, x: &[f64]) -> Prediction {
        match self {
            Model::Tree(t) => t.predict(x),
            Model::Logistic(m) => m.predict(x),
            Model::Linear(m) => Prediction::Real(m.predict(x)),
            Model::Nested(e) => e.predict_f64(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Staged {
    /// Initial score per output (one per class, or a single regression output).
    init: Vec<f64>,
    /// One tree per output per stage.
    stages: Vec<Vec<Tree>>,
    learning_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Members {
    Voters(Vec<Model>),
    Staged(Staged),
}

/// A trained committee. Immutable; prediction is pure.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    n_classes: Option<usize>,
    n_features: usize,
    members: Members,
    weights: Vec<f64>,
    trace: TrainTrace,
}

impl Ensemble {
    pub fn train(spec: &EnsembleSpec, data: &Dataset, seed: u64) -> Result<Ensemble, LearnError> {
        if data.is_empty() {
            return Err(LearnError::Empty);
        }
        spec.check(&data.task)?;
        let w = vec![1.0; data.len()];
        let p = Problem {
            x: &data.x,
            y: &data.y,
            w: &w,
        };
        Ok(Ensemble::fit(spec, &p, seed))
    }

    fn fit(spec: &EnsembleSpec, p: &Problem, seed: u64) -> Ensemble {
        let n_classes = match p.y {
            Targets::Class { n_classes, .. } => Some(*n_classes),
            Targets::Real(_) => None,
        };
        let mut e = Ensemble {
            n_classes,
            n_features: p.x.first().map_or(0, Vec::len),
            members: Members::Voters(Vec::new()),
            weights: Vec::new(),
            trace: TrainTrace::default(),
        };
        match spec.method {
            Method::Bagging | Method::RandomForest | Method::ExtraTrees => e.fit_bagging(spec, p, seed),
            Method::AdaBoost if n_classes.is_some() => e.fit_samme(spec, p, seed),
            Method::AdaBoost => e.fit_r2(spec, p, seed),
            Method::GradientBoosting => e.fit_gradient(spec, p, seed),
        }
        e
    }

    fn fit_bagging(&mut self, spec: &EnsembleSpec, p: &Problem, seed: u64) {
        let d = self.n_features;
        let params = match spec.method {
            Method::RandomForest => Some(TreeParams {
                max_features: Some(spec.max_features.unwrap_or(((d as f64).sqrt().floor() as usize).max(1))),
                ..TreeParams::default()
            }),
            Method::ExtraTrees => Some(TreeParams {
                random_thresholds: true,
                ..TreeParams::default()
            }),
            _ => None,
        };
        let fitted: Vec<(Model, usize, usize)> = (0..spec.n_members)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng::from_seed(rng::derive(seed, "bootstrap", i as u64));
                let counts = bootstrap(p.w, &mut rng);
                let size = counts.iter().sum::<f64>() as usize;
                let distinct = counts.iter().filter(|&&c| c > 0.0).count();
                let q = Problem { w: &counts, ..*p };
                let member_seed = rng::derive(seed, "member", i as u64);
                let model = match &params {
                    Some(tp) => Model::Tree(Tree::fit(tp, &q, &mut rng::from_seed(member_seed))),
                    None => Model::fit(&spec.base, &q, member_seed),
                };
                (model, size, distinct)
            })
            .collect();
        let mut models = Vec::with_capacity(fitted.len());
        for (model, size, distinct) in fitted {
            models.push(model);
            self.trace.bootstrap_sizes.push(size);
            self.trace.bootstrap_distinct.push(distinct);
        }
        self.weights = vec![1.0; models.len()];
        self.members = Members::Voters(models);
    }

    fn fit_samme(&mut self, spec: &EnsembleSpec, p: &Problem, seed: u64) {
        let Targets::Class { labels, n_classes } = p.y else {
            unreachable!()
        };
        let mut w = normalized(p.w);
        let mut models = Vec::new();
        for m in 0..spec.n_members {
            let q = Problem { w: &w, ..*p };
            let model = Model::fit(&spec.base, &q, rng::derive(seed, "member", m as u64));
            let wrong: Vec<bool> =
                p.x.iter()
                    .zip(labels)
                    .map(|(x, &y)| model.predict(x) != Prediction::Class(y))
                    .collect();
            let err: f64 = w.iter().zip(&wrong).filter(|(_, &b)| b).map(|(wi, _)| wi).sum();
            self.trace.member_errors.push(err);
            models.push(model);
            if err <= 0.0 {
                self.weights.push(1.0);
                break;
            }
            let alpha = samme_weight(err, *n_classes);
            self.weights.push(alpha);
            if alpha <= 0.0 {
                break;
            }
            for (wi, &b) in w.iter_mut().zip(&wrong) {
                if b {
                    *wi *= alpha.exp();
                }
            }
            w = normalized(&w);
            self.trace.sample_weight_sums.push(w.iter().sum());
        }
        self.members = Members::Voters(models);
        self.ensure_positive_weight();
    }

    fn fit_r2(&mut self, spec: &EnsembleSpec, p: &Problem, seed: u64) {
        let Targets::Real(y) = p.y else { unreachable!() };
        let mut w = normalized(p.w);
        let mut models = Vec::new();
        for m in 0..spec.n_members {
            let q = Problem { w: &w, ..*p };
            let model = Model::fit(&spec.base, &q, rng::derive(seed, "member", m as u64));
            let abs: Vec<f64> =
                p.x.iter()
                    .zip(y)
                    .map(|(x, &t)| (model.predict(x).as_real() - t).abs())
                    .collect();
            let max = abs
                .iter()
                .zip(&w)
                .filter(|(_, &wi)| wi > 0.0)
                .map(|(&a, _)| a)
                .fold(0.0, f64::max);
            models.push(model);
            if max <= 0.0 {
                self.trace.member_errors.push(0.0);
                self.weights.push(1.0);
                break;
            }
            let loss: Vec<f64> = abs.iter().map(|a| (a / max).min(1.0)).collect();
            let err: f64 = w.iter().zip(&loss).map(|(wi, l)| wi * l).sum();
            self.trace.member_errors.push(err);
            if err <= 0.0 {
                self.weights.push(1.0);
                break;
            }
            if err >= 0.5 - CHANCE_TOLERANCE {
                self.weights.push(0.0);
                break;
            }
            let beta = err / (1.0 - err);
            self.weights.push((1.0 / beta).ln());
            for (wi, l) in w.iter_mut().zip(&loss) {
                *wi *= beta.powf(1.0 - l);
            }
            w = normalized(&w);
            self.trace.sample_weight_sums.push(w.iter().sum());
        }
        self.members = Members::Voters(models);
        self.ensure_positive_weight();
    }

    fn fit_gradient(&mut self, spec: &EnsembleSpec, p: &Problem, seed: u64) {
        // One column of targets per output: class indicators, or the real target.
        let columns: Vec<Vec<f64>> = match p.y {
            Targets::Class { labels, n_classes } => (0..*n_classes)
                .map(|c| labels.iter().map(|&l| if l == c { 1.0 } else { 0.0 }).collect())
                .collect(),
            Targets::Real(y) => vec![y.clone()],
        };
        let total: f64 = p.w.iter().sum();
        let init: Vec<f64> = columns
            .iter()
            .map(|col| col.iter().zip(p.w).map(|(v, w)| v * w).sum::<f64>() / total)
            .collect();
        let mut scores: Vec<Vec<f64>> = columns
            .iter()
            .zip(&init)
            .map(|(col, &f0)| vec![f0; col.len()])
            .collect();
        let loss = |scores: &[Vec<f64>]| -> f64 {
            let mut s = 0.0;
            for (col, f) in columns.iter().zip(scores) {
                for i in 0..col.len() {
                    s += p.w[i] * (col[i] - f[i]).powi(2);
                }
            }
            s / total
        };
        self.trace.stage_losses.push(loss(&scores));

        let params = match spec.base {
            BaseLearnerKind::DecisionTree { max_depth } => TreeParams {
                max_depth,
                ..TreeParams::default()
            },
            _ => TreeParams {
                max_depth: Some(super::BOOSTING_TREE_DEPTH),
                ..TreeParams::default()
            },
        };
        let lr = spec.learning_rate;
        let mut stages = Vec::with_capacity(spec.n_members);
        for m in 0..spec.n_members {
            let mut rng = rng::from_seed(rng::derive(seed, "stage", m as u64));
            let mut stage = Vec::with_capacity(columns.len());
            for (col, f) in columns.iter().zip(scores.iter_mut()) {
                let residual = Targets::Real(col.iter().zip(f.iter()).map(|(y, s)| y - s).collect());
                let tree = Tree::fit(&params, &Problem { y: &residual, ..*p }, &mut rng);
                for (fi, x) in f.iter_mut().zip(p.x) {
                    *fi += lr * tree.predict(x).as_real();
                }
                stage.push(tree);
            }
            stages.push(stage);
            self.trace.stage_losses.push(loss(&scores));
        }
        self.weights = vec![lr; stages.len()];
        self.members = Members::Staged(Staged {
            init,
            stages,
            learning_rate: lr,
        });
    }

    fn ensure_positive_weight(&mut self) {
        if self.weights.iter().all(|&w| w <= 0.0) {
            self.weights[0] = 1.0;
        }
    }

    pub fn n_members(&self) -> usize {
        self.weights.len()
    }

    pub fn member_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn trace(&self) -> &TrainTrace {
        &self.trace
    }

    pub fn is_classification(&self) -> bool {
        self.n_classes.is_some()
    }

    fn check_dim(&self, input: &[i64]) -> Result<Vec<f64>, LearnError> {
        if input.len() != self.n_features {
            return Err(LearnError::DimensionMismatch {
                expected: self.n_features,
                got: input.len(),
            });
        }
        Ok(input.iter().map(|&v| v as f64).collect())
    }

    /// One prediction per committee member, in member order. For gradient
    /// boosting the members are the staged prefixes F1..Fn.
    pub fn predict_members(&self, input: &[i64]) -> Result<Vec<Prediction>, LearnError> {
        let x = self.check_dim(input)?;
        Ok(self.members_f64(&x))
    }

    /// The combined prediction: weighted plurality vote (ties to the smaller
    /// label) or weighted mean; the final stage for gradient boosting.
    pub fn predict(&self, input: &[i64]) -> Result<Prediction, LearnError> {
        let x = self.check_dim(input)?;
        Ok(self.predict_f64(&x))
    }

    fn members_f64(&self, x: &[f64]) -> Vec<Prediction> {
        match &self.members {
            Members::Voters(models) => models.iter().map(|m| m.predict(x)).collect(),
            Members::Staged(s) => {
                let mut f = s.init.clone();
                s.stages
                    .iter()
                    .map(|stage| {
                        for (fi, tree) in f.iter_mut().zip(stage) {
                            *fi += s.learning_rate * tree.predict(x).as_real();
                        }
                        self.staged_output(&f)
                    })
                    .collect()
            }
        }
    }

    fn staged_output(&self, f: &[f64]) -> Prediction {
        match self.n_classes {
            Some(_) => Prediction::Class(argmax(f)),
            None => Prediction::Real(f[0]),
        }
    }

    fn predict_f64(&self, x: &[f64]) -> Prediction {
        let preds = self.members_f64(x);
        if let Members::Staged(_) = self.members {
            return *preds.last().expect("at least one stage");
        }
        combine(&preds, &self.weights, self.n_classes)
    }
}

const CHANCE_TOLERANCE: f64 = 1e-10;

/// SAMME member weight `ln((1 - err) / err) + ln(k - 1)`, or 0 when the
/// member is no better than chance (`err >= 1 - 1/k`, up to rounding).
pub fn samme_weight(err: f64, n_classes: usize) -> f64 {
    let k = n_classes as f64;
    if err >= 1.0 - 1.0 / k - CHANCE_TOLERANCE {
        return 0.0;
    }
    ((1.0 - err) / err).ln() + (k - 1.0).ln()
}

/// Weighted vote or weighted mean of member predictions.
pub fn combine(preds: &[Prediction], weights: &[f64], n_classes: Option<usize>) -> Prediction {
    match n_classes {
        Some(k) => {
            let mut votes = vec![0.0; k.max(1)];
            for (p, w) in preds.iter().zip(weights) {
                if let Prediction::Class(c) = p {
                    votes[*c] += w;
                }
            }
            Prediction::Class(argmax(&votes))
        }
        None => {
            let (sw, swp) = preds
                .iter()
                .zip(weights)
                .fold((0.0, 0.0), |(a, b), (p, w)| (a + w, b + w * p.as_real()));
            Prediction::Real(swp / sw)
        }
    }
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

/// Draws as many rows as have positive weight, with probability proportional
/// to weight, and returns the draw counts per row.
fn bootstrap(w: &[f64], rng: &mut Rng) -> Vec<f64> {
    let n = w.iter().filter(|&&v| v > 0.0).count();
    let dist = WeightedIndex::new(w).expect("some positive weight");
    let mut counts = vec![0.0; w.len()];
    for _ in 0..n {
        counts[dist.sample(rng)] += 1.0;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vote_and_mean_combination() {
        let p = [Prediction::Class(0), Prediction::Class(1)];
        assert_eq!(combine(&p, &[0.6, 0.4], Some(2)), Prediction::Class(0));
        assert_eq!(combine(&p, &[0.4, 0.6], Some(2)), Prediction::Class(1));
        assert_eq!(combine(&p, &[0.5, 0.5], Some(2)), Prediction::Class(0));
        let r = [Prediction::Real(1.0), Prediction::Real(2.0), Prediction::Real(3.0)];
        assert_eq!(combine(&r, &[1.0; 3], None), Prediction::Real(2.0));
    }

    #[test]
    fn samme_weights() {
        assert_eq!(samme_weight(0.5, 2), 0.0);
        assert_eq!(samme_weight(0.75, 4), 0.0);
        assert!((samme_weight(0.25, 2) - 3f64.ln()).abs() < 1e-12);
        assert!((samme_weight(0.5, 3) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn bootstrap_keeps_size() {
        let mut rng = rng::from_seed(3);
        let counts = bootstrap(&[1.0; 100], &mut rng);
        assert_eq!(counts.iter().sum::<f64>(), 100.0);
        assert!(counts.contains(&0.0));
    }
}
