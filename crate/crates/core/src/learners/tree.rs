//! CART decision trees with sample weights.
//!
//! Splits are axis-aligned `x[f] <= t`. Classification minimizes weighted Gini
//! impurity, regression weighted squared error. Thresholds are midpoints
//! between consecutive distinct values, or (extra-trees mode) a uniform draw
//! between the node's minimum and maximum for each feature.

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{Prediction, Problem, Targets};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features examined per split; `None` means all.
    pub max_features: Option<usize>,
    pub random_thresholds: bool,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            max_features: None,
            random_thresholds: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(Prediction),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

struct Split {
    score: f64,
    feature: usize,
    threshold: f64,
}

impl Split {
    fn better_than(&self, other: &Option<Split>) -> bool {
        match other {
            None => true,
            Some(o) => {
                self.score < o.score
                    || (self.score == o.score && (self.feature, self.threshold) < (o.feature, o.threshold))
            }
        }
    }
}

impl Tree {
    /// Rows with zero weight are ignored. Panics if no row has positive weight.
    pub fn fit(params: &TreeParams, problem: &Problem, rng: &mut Rng) -> Tree {
        let rows: Vec<usize> = (0..problem.x.len()).filter(|&i| problem.w[i] > 0.0).collect();
        assert!(!rows.is_empty(), "tree fit needs a row with positive weight");
        let mut tree = Tree { nodes: Vec::new() };
        tree.grow(params, problem, rows, 0, rng);
        tree
    }

    pub fn predict(&self, x: &[f64]) -> Prediction {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(p) => return *p,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    fn grow(&mut self, params: &TreeParams, p: &Problem, rows: Vec<usize>, depth: usize, rng: &mut Rng) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(leaf_value(p, &rows)));

        let depth_ok = params.max_depth.is_none_or(|d| depth < d);
        if !depth_ok || rows.len() < params.min_samples_split.max(2) || is_pure(p, &rows) {
            return id;
        }
        let Some(split) = best_split(params, p, &rows, rng) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| p.x[i][split.feature] <= split.threshold);
        let left = self.grow(params, p, l, depth + 1, rng);
        let right = self.grow(params, p, r, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

fn leaf_value(p: &Problem, rows: &[usize]) -> Prediction {
    match p.y {
        Targets::Class { labels, n_classes } => {
            let mut counts = vec![0.0; *n_classes];
            for &i in rows {
                counts[labels[i]] += p.w[i];
            }
            Prediction::Class(argmax(&counts))
        }
        Targets::Real(y) => {
            let (sw, swy) = rows
                .iter()
                .fold((0.0, 0.0), |(a, b), &i| (a + p.w[i], b + p.w[i] * y[i]));
            Prediction::Real(swy / sw)
        }
    }
}

/// Index of the largest value; ties go to the smallest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn is_pure(p: &Problem, rows: &[usize]) -> bool {
    match p.y {
        Targets::Class { labels, .. } => rows.iter().all(|&i| labels[i] == labels[rows[0]]),
        Targets::Real(y) => rows.iter().all(|&i| y[i] == y[rows[0]]),
    }
}

/// Weighted impurity accumulator for one side of a split.
#[derive(Clone)]
enum Stats {
    Class { counts: Vec<f64>, total: f64 },
    Real { sw: f64, swy: f64, swyy: f64 },
}

impl Stats {
    fn empty(p: &Problem) -> Stats {
        match p.y {
            Targets::Class { n_classes, .. } => Stats::Class {
                counts: vec![0.0; *n_classes],
                total: 0.0,
            },
            Targets::Real(_) => Stats::Real {
                sw: 0.0,
                swy: 0.0,
                swyy: 0.0,
            },
        }
    }

    fn add(&mut self, p: &Problem, i: usize, sign: f64) {
        let w = p.w[i] * sign;
        match (self, p.y) {
            (Stats::Class { counts, total }, Targets::Class { labels, .. }) => {
                counts[labels[i]] += w;
                *total += w;
            }
            (Stats::Real { sw, swy, swyy }, Targets::Real(y)) => {
                *sw += w;
                *swy += w * y[i];
                *swyy += w * y[i] * y[i];
            }
            _ => unreachable!("stats built for the problem's target kind"),
        }
    }

    /// Weight times impurity: W·Gini or weighted SSE.
    fn cost(&self) -> f64 {
        match self {
            Stats::Class { counts, total } => {
                if *total <= 0.0 {
                    return 0.0;
                }
                let sum_sq: f64 = counts.iter().map(|c| c * c).sum();
                total - sum_sq / total
            }
            Stats::Real { sw, swy, swyy } => {
                if *sw <= 0.0 {
                    return 0.0;
                }
                (swyy - swy * swy / sw).max(0.0)
            }
        }
    }
}

fn best_split(params: &TreeParams, p: &Problem, rows: &[usize], rng: &mut Rng) -> Option<Split> {
    let n_features = p.x[0].len();
    let mut order: Vec<usize> = (0..n_features).collect();
    let budget = match params.max_features {
        Some(k) => {
            order.shuffle(rng);
            k.clamp(1, n_features.max(1))
        }
        None => n_features,
    };

    let mut best: Option<Split> = None;
    let mut examined = 0;
    for &f in &order {
        if examined >= budget && best.is_some() {
            break;
        }
        let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            (lo.min(p.x[i][f]), hi.max(p.x[i][f]))
        });
        if lo == hi {
            continue;
        }
        examined += 1;
        let candidate = if params.random_thresholds {
            random_split(p, rows, f, lo, hi, rng)
        } else {
            sweep_split(p, rows, f)
        };
        if let Some(c) = candidate {
            if c.better_than(&best) {
                best = Some(c);
            }
        }
    }
    best
}

fn sweep_split(p: &Problem, rows: &[usize], f: usize) -> Option<Split> {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|&a, &b| p.x[a][f].total_cmp(&p.x[b][f]).then(a.cmp(&b)));
    let mut left = Stats::empty(p);
    let mut right = Stats::empty(p);
    for &i in &sorted {
        right.add(p, i, 1.0);
    }
    let mut best: Option<Split> = None;
    for k in 0..sorted.len() - 1 {
        let i = sorted[k];
        left.add(p, i, 1.0);
        right.add(p, i, -1.0);
        let (a, b) = (p.x[i][f], p.x[sorted[k + 1]][f]);
        if a == b {
            continue;
        }
        let s = Split {
            score: left.cost() + right.cost(),
            feature: f,
            threshold: a + (b - a) / 2.0,
        };
        if s.better_than(&best) {
            best = Some(s);
        }
    }
    best
}

fn random_split(p: &Problem, rows: &[usize], f: usize, lo: f64, hi: f64, rng: &mut Rng) -> Option<Split> {
    let threshold = rng.gen_range(lo..hi);
    let mut left = Stats::empty(p);
    let mut right = Stats::empty(p);
    for &i in rows {
        if p.x[i][f] <= threshold {
            left.add(p, i, 1.0);
        } else {
            right.add(p, i, 1.0);
        }
    }
    Some(Split {
        score: left.cost() + right.cost(),
        feature: f,
        threshold,
    })
}
