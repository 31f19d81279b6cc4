use nalgebra::{DMatrix, DVector};

use super::tree::argmax;
use super::{Prediction, Problem, Targets};

/// Ordinary (weighted) least squares with an intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRegression {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl LinearRegression {
    pub fn fit(p: &Problem) -> LinearRegression {
        let Targets::Real(y) = p.y else {
            panic!("linear regression fit on class targets");
        };
        let rows: Vec<usize> = (0..p.x.len()).filter(|&i| p.w[i] > 0.0).collect();
        let d = p.x[0].len();
        let a = DMatrix::from_fn(rows.len(), d + 1, |r, c| {
            let i = rows[r];
            let s = p.w[i].sqrt();
            if c < d {
                s * p.x[i][c]
            } else {
                s
            }
        });
        let b = DVector::from_iterator(rows.len(), rows.iter().map(|&i| p.w[i].sqrt() * y[i]));
        // SVD gives the minimum-norm solution when the design is rank deficient
        // (e.g. a bootstrap sample with a single distinct row).
        let beta = a
            .svd(true, true)
            .solve(&b, 1e-10)
            .unwrap_or_else(|_| DVector::zeros(d + 1));
        LinearRegression {
            coefficients: beta.iter().take(d).copied().collect(),
            intercept: beta[d],
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            learning_rate: 0.1,
            epochs: 500,
            l2: 1e-4,
        }
    }
}

/// Multinomial softmax regression trained by full-batch gradient descent on
/// standardized features.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    mean: Vec<f64>,
    scale: Vec<f64>,
    /// `n_classes` rows of `d + 1` weights, bias last.
    weights: Vec<Vec<f64>>,
}

impl LogisticRegression {
    pub fn fit(params: &LogisticParams, p: &Problem) -> LogisticRegression {
        let Targets::Class { labels, n_classes } = p.y else {
            panic!("logistic regression fit on real targets");
        };
        let k = *n_classes;
        let rows: Vec<usize> = (0..p.x.len()).filter(|&i| p.w[i] > 0.0).collect();
        let d = p.x[0].len();
        let n = rows.len() as f64;

        let mean: Vec<f64> = (0..d)
            .map(|f| rows.iter().map(|&i| p.x[i][f]).sum::<f64>() / n)
            .collect();
        let scale: Vec<f64> = (0..d)
            .map(|f| {
                let var = rows.iter().map(|&i| (p.x[i][f] - mean[f]).powi(2)).sum::<f64>() / n;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let z: Vec<Vec<f64>> = rows
            .iter()
            .map(|&i| {
                let mut v: Vec<f64> = (0..d).map(|f| (p.x[i][f] - mean[f]) / scale[f]).collect();
                v.push(1.0);
                v
            })
            .collect();
        let total_w: f64 = rows.iter().map(|&i| p.w[i]).sum();

        let mut weights = vec![vec![0.0; d + 1]; k];
        let mut grad = vec![vec![0.0; d + 1]; k];
        let mut probs = vec![0.0; k];
        for _ in 0..params.epochs {
            for g in grad.iter_mut() {
                g.iter_mut().for_each(|v| *v = 0.0);
            }
            for (r, &i) in rows.iter().enumerate() {
                softmax_into(&weights, &z[r], &mut probs);
                let wi = p.w[i] / total_w;
                for c in 0..k {
                    let err = probs[c] - if labels[i] == c { 1.0 } else { 0.0 };
                    for (g, zv) in grad[c].iter_mut().zip(&z[r]) {
                        *g += wi * err * zv;
                    }
                }
            }
            for c in 0..k {
                for j in 0..=d {
                    let reg = if j < d { params.l2 * weights[c][j] } else { 0.0 };
                    weights[c][j] -= params.learning_rate * (grad[c][j] + reg);
                }
            }
        }
        LogisticRegression { mean, scale, weights }
    }

    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let mut z: Vec<f64> = x
            .iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect();
        z.push(1.0);
        let mut probs = vec![0.0; self.weights.len()];
        softmax_into(&self.weights, &z, &mut probs);
        probs
    }

    pub fn predict(&self, x: &[f64]) -> Prediction {
        Prediction::Class(argmax(&self.probabilities(x)))
    }
}

fn softmax_into(weights: &[Vec<f64>], z: &[f64], out: &mut [f64]) {
    for (o, w) in out.iter_mut().zip(weights) {
        *o = w.iter().zip(z).map(|(a, b)| a * b).sum();
    }
    let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}
