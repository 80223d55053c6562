//! Linear soft-margin SVM trained by full-batch subgradient descent on the
//! regularized hinge loss. Features are z-score standardized inside the
//! model (training statistics; records are never mutated). With weights
//! initialized to zero and full batches, training is deterministic without
//! randomness.
//!
//! The loss and its subgradient are exposed as free functions over plain
//! slices so they can be checked against finite differences.

use crate::data::{Dataset, PatientRecord, PREDICTORS};
use crate::learners::HyperParams;

const D: usize = PREDICTORS.len();

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub weights: [f64; D],
    pub bias: f64,
    pub means: [f64; D],
    pub scales: [f64; D],
}

/// Regularized hinge loss:
/// `lambda/2 ||w||^2 + mean_i max(0, 1 - y_i (w.x_i + b))`, labels in {-1,+1}.
pub fn hinge_loss(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[f64], lambda: f64) -> f64 {
    let mut loss = 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>();
    for (x, &y) in xs.iter().zip(ys) {
        let score: f64 = b + w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>();
        loss += (1.0 - y * score).max(0.0) / xs.len() as f64;
    }
    loss
}

/// Subgradient of [`hinge_loss`] in `(w, b)`. At hinge kinks (margin exactly
/// 1) the zero branch is chosen; everywhere else this is the gradient.
pub fn hinge_gradient(
    w: &[f64],
    b: f64,
    xs: &[Vec<f64>],
    ys: &[f64],
    lambda: f64,
) -> (Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut gw: Vec<f64> = w.iter().map(|v| lambda * v).collect();
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let score: f64 = b + w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>();
        if y * score < 1.0 {
            for (g, xi) in gw.iter_mut().zip(x) {
                *g -= y * xi / n;
            }
            gb -= y / n;
        }
    }
    (gw, gb)
}

impl SvmModel {
    pub fn train(d: &Dataset, params: &HyperParams) -> SvmModel {
        let n = d.len();
        let mut means = [0.0f64; D];
        let mut scales = [0.0f64; D];
        for f in 0..D {
            let mean = d.records.iter().map(|r| r.feature(f)).sum::<f64>() / n as f64;
            let var = d
                .records
                .iter()
                .map(|r| (r.feature(f) - mean) * (r.feature(f) - mean))
                .sum::<f64>()
                / n as f64;
            means[f] = mean;
            scales[f] = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
        }
        let xs: Vec<Vec<f64>> = d
            .records
            .iter()
            .map(|r| (0..D).map(|f| (r.feature(f) - means[f]) / scales[f]).collect())
            .collect();
        let ys: Vec<f64> = d
            .records
            .iter()
            .map(|r| if r.cardio == 1 { 1.0 } else { -1.0 })
            .collect();
        let lambda = 1.0 / (params.svm_c * n as f64);

        let mut w = vec![0.0f64; D];
        let mut b = 0.0f64;
        for t in 0..params.svm_epochs {
            let eta = params.svm_learning_rate / (1.0 + t as f64 / 20.0);
            let (gw, gb) = hinge_gradient(&w, b, &xs, &ys, lambda);
            for (wi, gi) in w.iter_mut().zip(&gw) {
                *wi -= eta * gi;
            }
            b -= eta * gb;
        }
        SvmModel {
            weights: std::array::from_fn(|f| w[f]),
            bias: b,
            means,
            scales,
        }
    }

    /// The standardized linear score w.(x-mean)/scale + bias.
    pub fn decision_value(&self, r: &PatientRecord) -> f64 {
        let mut s = self.bias;
        for f in 0..D {
            s += self.weights[f] * (r.feature(f) - self.means[f]) / self.scales[f];
        }
        s
    }

    pub fn predict(&self, r: &PatientRecord) -> u8 {
        (self.decision_value(r) > 0.0) as u8
    }
}
