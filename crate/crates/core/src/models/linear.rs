//! Linear models: L2-regularized logistic regression by full-batch gradient
//! descent, and a Pegasos-style linear SVM.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LogRegParams, SvmParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn margin(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Logistic objective and its gradient.
///
/// `J(w, b) = (1/n) Σ sᵢ [softplus(zᵢ) − yᵢ zᵢ] + (λ/2)‖w‖²` with
/// `zᵢ = w·xᵢ + b`, targets `yᵢ ∈ {0, 1}` and sample weights `sᵢ`. The bias
/// is not regularized. Returns `(J, ∂J/∂w, ∂J/∂b)`.
pub fn logistic_loss_grad(
    x: &[Vec<f64>],
    y: &[f64],
    sample_weight: &[f64],
    model: &LinearModel,
    lambda: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; model.weights.len()];
    let mut gb = 0.0;
    for ((row, &t), &s) in x.iter().zip(y).zip(sample_weight) {
        let z = model.margin(row);
        loss += s * (softplus(z) - t * z);
        let r = s * (sigmoid(z) - t);
        for (g, v) in gw.iter_mut().zip(row) {
            *g += r * v;
        }
        gb += r;
    }
    let reg: f64 = model.weights.iter().map(|w| w * w).sum();
    loss = loss / n + 0.5 * lambda * reg;
    for (g, w) in gw.iter_mut().zip(&model.weights) {
        *g = *g / n + lambda * w;
    }
    (loss, gw, gb / n)
}

pub fn fit_logistic(x: &[Vec<f64>], y: &[f64], sample_weight: &[f64], p: &LogRegParams) -> LinearModel {
    let mut m = LinearModel::zeros(x[0].len());
    for _ in 0..p.iterations {
        let (_, gw, gb) = logistic_loss_grad(x, y, sample_weight, &m, p.lambda);
        for (w, g) in m.weights.iter_mut().zip(&gw) {
            *w -= p.learning_rate * g;
        }
        m.bias -= p.learning_rate * gb;
    }
    m
}

/// Primal SVM objective `(λ/2)‖w̃‖² + (1/n) Σ sᵢ max(0, 1 − yᵢ w̃·x̃ᵢ)`, where
/// the bias is folded in as the weight of a constant unit feature.
pub fn hinge_objective(x: &[Vec<f64>], y: &[f64], sample_weight: &[f64], m: &LinearModel, lambda: f64) -> f64 {
    let n = x.len() as f64;
    let hinge: f64 = x
        .iter()
        .zip(y)
        .zip(sample_weight)
        .map(|((row, &t), &s)| s * (1.0 - t * m.margin(row)).max(0.0))
        .sum();
    let reg = m.weights.iter().map(|w| w * w).sum::<f64>() + m.bias * m.bias;
    0.5 * lambda * reg + hinge / n
}

#[derive(Debug, Clone, PartialEq)]
pub struct PegasosFit {
    pub model: LinearModel,
    /// Objective of the running average of all iterates, taken at the end of
    /// each epoch. Empty unless tracking was requested.
    pub epoch_objective: Vec<f64>,
}

/// Pegasos stochastic subgradient descent with step `1/(λt)`, one pass per
/// epoch over a seeded shuffle, followed by projection onto the ball of
/// radius `1/√λ`. Targets are `±1`.
pub fn fit_pegasos(
    x: &[Vec<f64>],
    y: &[f64],
    sample_weight: &[f64],
    p: &SvmParams,
    seed: u64,
    track_objective: bool,
) -> PegasosFit {
    let d = x[0].len();
    let lambda = p.lambda;
    let radius = 1.0 / lambda.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut m = LinearModel::zeros(d);
    let mut t = 0u64;
    let mut epoch_objective = Vec::new();
    let mut avg = LinearModel::zeros(d);
    for _ in 0..p.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let violated = y[i] * m.margin(&x[i]) < 1.0;
            let shrink = 1.0 - eta * lambda;
            m.weights.iter_mut().for_each(|w| *w *= shrink);
            m.bias *= shrink;
            if violated {
                let step = eta * y[i] * sample_weight[i];
                for (w, v) in m.weights.iter_mut().zip(&x[i]) {
                    *w += step * v;
                }
                m.bias += step;
            }
            let norm = (m.weights.iter().map(|w| w * w).sum::<f64>() + m.bias * m.bias).sqrt();
            if norm > radius {
                let s = radius / norm;
                m.weights.iter_mut().for_each(|w| *w *= s);
                m.bias *= s;
            }
            if track_objective {
                let r = 1.0 / t as f64;
                for (a, w) in avg.weights.iter_mut().zip(&m.weights) {
                    *a += (w - *a) * r;
                }
                avg.bias += (m.bias - avg.bias) * r;
            }
        }
        if track_objective {
            epoch_objective.push(hinge_objective(x, y, sample_weight, &avg, lambda));
        }
    }
    PegasosFit {
        model: m,
        epoch_objective,
    }
}
