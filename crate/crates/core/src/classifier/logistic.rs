//! L2-regularized logistic regression via full-batch gradient descent on
//! standardized features, with the scaling folded back into the stored
//! weights.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// L2 penalty strength; larger shrinks harder.
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams { l2: 1.0 }
    }
}

/// Weights on the raw (unstandardized) feature scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        let z: f64 = self
            .weights
            .iter()
            .zip(x)
            .map(|(w, v)| w * v)
            .sum::<f64>()
            + self.bias;
        sigmoid(z)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

const ITERATIONS: usize = 400;
const LEARNING_RATE: f64 = 0.5;

/// Deterministic training: zero init, fixed iteration count, no randomness.
pub fn train_logistic(xs: &[Vec<f64>], ys: &[bool], params: &LogisticParams) -> LogisticModel {
    assert!(!xs.is_empty(), "training set must be non-empty");
    let n = xs.len();
    let d = xs[0].len();

    // standardize per feature; constant features become all-zero columns
    let mut means = vec![0.0; d];
    for x in xs {
        for (m, v) in means.iter_mut().zip(x) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut stds = vec![0.0; d];
    for x in xs {
        for j in 0..d {
            stds[j] += (x[j] - means[j]).powi(2);
        }
    }
    for s in &mut stds {
        *s = (*s / n as f64).sqrt();
        if *s < 1e-12 {
            *s = 1.0;
        }
    }
    let scaled: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| {
            x.iter()
                .enumerate()
                .map(|(j, v)| (v - means[j]) / stds[j])
                .collect()
        })
        .collect();

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let targets: Vec<f64> = ys.iter().map(|&y| if y { 1.0 } else { 0.0 }).collect();
    for _ in 0..ITERATIONS {
        let mut grad_w = vec![0.0; d];
        let mut grad_b = 0.0;
        for (x, &t) in scaled.iter().zip(&targets) {
            let err = sigmoid(
                w.iter().zip(x).map(|(wj, xj)| wj * xj).sum::<f64>() + b,
            ) - t;
            for (g, xj) in grad_w.iter_mut().zip(x) {
                *g += err * xj;
            }
            grad_b += err;
        }
        let n_f = n as f64;
        for j in 0..d {
            // bias stays unregularized
            w[j] -= LEARNING_RATE * (grad_w[j] / n_f + params.l2 * w[j] / n_f);
        }
        b -= LEARNING_RATE * grad_b / n_f;
    }

    // fold standardization into raw-scale parameters
    let mut weights = vec![0.0; d];
    let mut bias = b;
    for j in 0..d {
        weights[j] = w[j] / stds[j];
        bias -= w[j] * means[j] / stds[j];
    }
    LogisticModel { weights, bias }
}
