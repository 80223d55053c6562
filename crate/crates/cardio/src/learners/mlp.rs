//! Single-hidden-layer perceptron: inputs -> sigmoid hidden layer -> one
//! sigmoid output, trained by per-instance (online) backpropagation with
//! momentum on squared error, visiting records in dataset order each epoch.
//! Features are min-max scaled inside the model. Weights initialize uniformly
//! in [-0.5, 0.5] from the seed, so training is deterministic per seed.
//!
//! The batch loss and gradient are exposed over a flat parameter vector
//! `[w1 row-major, b1, w2, b2]` so backpropagation can be checked against
//! finite differences; the online step uses the same backward pass on a
//! single sample.

use crate::data::{Dataset, PatientRecord, PREDICTORS};
use crate::learners::HyperParams;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const D: usize = PREDICTORS.len();

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub hidden: usize,
    /// Flat parameters: hidden*inputs weights, hidden biases, hidden output
    /// weights, one output bias.
    pub theta: Vec<f64>,
    pub mins: [f64; D],
    /// max - min per feature; 1 where the feature is constant.
    pub ranges: [f64; D],
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z.clamp(-700.0, 700.0)).exp())
}

pub fn parameter_count(hidden: usize, inputs: usize) -> usize {
    hidden * inputs + hidden + hidden + 1
}

/// Forward pass for one sample; returns the output activation.
fn forward(theta: &[f64], hidden: usize, x: &[f64], h_buf: &mut [f64]) -> f64 {
    let d = x.len();
    let (w1, rest) = theta.split_at(hidden * d);
    let (b1, rest) = rest.split_at(hidden);
    let (w2, b2) = rest.split_at(hidden);
    for j in 0..hidden {
        let mut z = b1[j];
        let row = &w1[j * d..(j + 1) * d];
        for i in 0..d {
            z += row[i] * x[i];
        }
        h_buf[j] = sigmoid(z);
    }
    let mut zo = b2[0];
    for j in 0..hidden {
        zo += w2[j] * h_buf[j];
    }
    sigmoid(zo)
}

/// Mean squared error `1/(2n) * sum (o_i - y_i)^2` over the batch.
pub fn mse_loss(theta: &[f64], hidden: usize, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
    let mut h = vec![0.0; hidden];
    let mut loss = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let o = forward(theta, hidden, x, &mut h);
        loss += (o - y) * (o - y);
    }
    loss / (2.0 * xs.len() as f64)
}

/// Backpropagated gradient of [`mse_loss`] in the flat parameter layout.
pub fn mse_gradient(theta: &[f64], hidden: usize, xs: &[Vec<f64>], ys: &[f64]) -> Vec<f64> {
    let d = xs[0].len();
    let n = xs.len() as f64;
    let (w1, rest) = theta.split_at(hidden * d);
    let (b1, rest) = rest.split_at(hidden);
    let (w2, b2) = rest.split_at(hidden);
    let mut grad = vec![0.0; theta.len()];
    let mut h = vec![0.0; hidden];
    for (x, &y) in xs.iter().zip(ys) {
        for j in 0..hidden {
            let mut z = b1[j];
            let row = &w1[j * d..(j + 1) * d];
            for i in 0..d {
                z += row[i] * x[i];
            }
            h[j] = sigmoid(z);
        }
        let mut zo = b2[0];
        for j in 0..hidden {
            zo += w2[j] * h[j];
        }
        let o = sigmoid(zo);
        let delta_o = (o - y) * o * (1.0 - o) / n;
        let (gw1, grest) = grad.split_at_mut(hidden * d);
        let (gb1, grest) = grest.split_at_mut(hidden);
        let (gw2, gb2) = grest.split_at_mut(hidden);
        for j in 0..hidden {
            gw2[j] += delta_o * h[j];
            let delta_h = delta_o * w2[j] * h[j] * (1.0 - h[j]);
            let grow = &mut gw1[j * d..(j + 1) * d];
            for i in 0..d {
                grow[i] += delta_h * x[i];
            }
            gb1[j] += delta_h;
        }
        gb2[0] += delta_o;
    }
    grad
}

impl MlpModel {
    pub fn train(d: &Dataset, params: &HyperParams) -> MlpModel {
        let mut mins = [f64::INFINITY; D];
        let mut maxs = [f64::NEG_INFINITY; D];
        for r in &d.records {
            for f in 0..D {
                mins[f] = mins[f].min(r.feature(f));
                maxs[f] = maxs[f].max(r.feature(f));
            }
        }
        let ranges: [f64; D] =
            std::array::from_fn(|f| if maxs[f] > mins[f] { maxs[f] - mins[f] } else { 1.0 });
        let xs: Vec<Vec<f64>> = d
            .records
            .iter()
            .map(|r| (0..D).map(|f| (r.feature(f) - mins[f]) / ranges[f]).collect())
            .collect();
        let ys: Vec<f64> = d.records.iter().map(|r| r.cardio as f64).collect();

        let hidden = params.hidden_units;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut theta: Vec<f64> = (0..parameter_count(hidden, D))
            .map(|_| rng.gen_range(-0.5..0.5))
            .collect();
        let mut velocity = vec![0.0; theta.len()];
        let mut h = vec![0.0; hidden];
        let mut delta_h = vec![0.0; hidden];
        let lr = params.mlp_learning_rate;
        let mom = params.momentum;
        for _ in 0..params.mlp_epochs {
            for (x, &y) in xs.iter().zip(&ys) {
                let o = forward(&theta, hidden, x, &mut h);
                let delta_o = (o - y) * o * (1.0 - o);
                {
                    let (_, rest) = theta.split_at(hidden * D);
                    let (_, rest) = rest.split_at(hidden);
                    let (w2, _) = rest.split_at(hidden);
                    for j in 0..hidden {
                        delta_h[j] = delta_o * w2[j] * h[j] * (1.0 - h[j]);
                    }
                }
                let (vw1, vrest) = velocity.split_at_mut(hidden * D);
                let (vb1, vrest) = vrest.split_at_mut(hidden);
                let (vw2, vb2) = vrest.split_at_mut(hidden);
                let (tw1, trest) = theta.split_at_mut(hidden * D);
                let (tb1, trest) = trest.split_at_mut(hidden);
                let (tw2, tb2) = trest.split_at_mut(hidden);
                for j in 0..hidden {
                    vw2[j] = mom * vw2[j] - lr * delta_o * h[j];
                    tw2[j] += vw2[j];
                    let vrow = &mut vw1[j * D..(j + 1) * D];
                    let trow = &mut tw1[j * D..(j + 1) * D];
                    for i in 0..D {
                        vrow[i] = mom * vrow[i] - lr * delta_h[j] * x[i];
                        trow[i] += vrow[i];
                    }
                    vb1[j] = mom * vb1[j] - lr * delta_h[j];
                    tb1[j] += vb1[j];
                }
                vb2[0] = mom * vb2[0] - lr * delta_o;
                tb2[0] += vb2[0];
            }
        }
        MlpModel {
            hidden,
            theta,
            mins,
            ranges,
        }
    }

    /// Network output in (0, 1) for one record.
    pub fn activation(&self, r: &PatientRecord) -> f64 {
        let x: Vec<f64> = (0..D)
            .map(|f| (r.feature(f) - self.mins[f]) / self.ranges[f])
            .collect();
        let mut h = vec![0.0; self.hidden];
        forward(&self.theta, self.hidden, &x, &mut h)
    }

    pub fn predict(&self, r: &PatientRecord) -> u8 {
        (self.activation(r) > 0.5) as u8
    }
}
