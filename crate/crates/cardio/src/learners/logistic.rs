//! Logistic regression fit by iteratively reweighted least squares
//! (Newton's method) with a small ridge penalty on the non-intercept
//! weights. Features enter raw; the classifier is the sign of the linear
//! score, with 0 breaking toward class 0.

use crate::data::{Dataset, PatientRecord, PREDICTORS};
use crate::learners::HyperParams;

const D: usize = PREDICTORS.len();

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: [f64; D],
    pub intercept: f64,
    /// Newton iterations actually performed.
    pub iterations: usize,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z.clamp(-700.0, 700.0)).exp())
}

/// Solve `a x = b` for a small dense symmetric positive-definite system by
/// Gaussian elimination with partial pivoting. `a` is row-major n*n.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col]
                    .abs()
                    .partial_cmp(&a[j * n + col].abs())
                    .unwrap()
            })
            .unwrap();
        if a[pivot_row * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Some(x)
}

impl LogisticModel {
    pub fn train(d: &Dataset, params: &HyperParams) -> LogisticModel {
        const P: usize = D + 1; // weights + intercept
        let n = d.len();
        let xs: Vec<[f64; D]> = d
            .records
            .iter()
            .map(|r| std::array::from_fn(|f| r.feature(f)))
            .collect();
        let ys: Vec<f64> = d.records.iter().map(|r| r.cardio as f64).collect();

        // penalized log-likelihood, the line-search objective
        let objective = |theta: &[f64; P]| -> f64 {
            let mut ll = 0.0;
            for i in 0..n {
                let x = &xs[i];
                let mut z = theta[D];
                for f in 0..D {
                    z += theta[f] * x[f];
                }
                // log p for y=1, log(1-p) for y=0, written stably
                let zc = z.clamp(-700.0, 700.0);
                ll += ys[i] * zc - (1.0 + zc.exp()).ln();
            }
            for f in 0..D {
                ll -= 0.5 * params.ridge * theta[f] * theta[f];
            }
            ll
        };

        let mut theta = [0.0f64; P]; // [weights..., intercept]
        let mut current = objective(&theta);
        let mut iterations = 0;
        for _ in 0..params.max_iterations {
            iterations += 1;
            // gradient of penalized log-likelihood and Hessian of the
            // negative of it
            let mut grad = [0.0f64; P];
            let mut hess = vec![0.0f64; P * P];
            for i in 0..n {
                let x = &xs[i];
                let mut z = theta[D];
                for f in 0..D {
                    z += theta[f] * x[f];
                }
                let p = sigmoid(z);
                let resid = ys[i] - p;
                let w = (p * (1.0 - p)).max(1e-10);
                for f in 0..D {
                    grad[f] += resid * x[f];
                }
                grad[D] += resid;
                // upper triangle of x_aug x_augᵀ weighted by w
                for a in 0..D {
                    let wa = w * x[a];
                    for b in a..D {
                        hess[a * P + b] += wa * x[b];
                    }
                    hess[a * P + D] += wa;
                }
                hess[D * P + D] += w;
            }
            // ridge on non-intercept weights
            for f in 0..D {
                grad[f] -= params.ridge * theta[f];
                hess[f * P + f] += params.ridge;
            }
            // mirror to lower triangle
            for a in 0..P {
                for b in 0..a {
                    hess[a * P + b] = hess[b * P + a];
                }
            }
            // Solve H·step = grad. Constant or collinear predictor columns
            // can leave the system numerically singular (the intercept
            // carries no ridge), so retry with growing diagonal damping
            // until a finite step comes back.
            let diag_scale = (0..P).map(|j| hess[j * P + j]).fold(1e-12, f64::max);
            let mut step = None;
            let mut damping = 0.0;
            for _ in 0..6 {
                let mut h = hess.clone();
                for j in 0..P {
                    h[j * P + j] += damping * diag_scale;
                }
                let mut rhs = grad.to_vec();
                match solve_dense(&mut h, &mut rhs, P) {
                    Some(s) if s.iter().all(|v| v.is_finite()) => {
                        step = Some(s);
                        break;
                    }
                    _ => damping = if damping == 0.0 { 1e-12 } else { damping * 100.0 },
                }
            }
            let Some(step) = step else {
                break;
            };
            // Newton with step halving: on separable or ill-conditioned data
            // the full step can overshoot, so back off until the objective
            // stops getting worse.
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let candidate = std::array::from_fn(|j| theta[j] + scale * step[j]);
                let value = objective(&candidate);
                if value >= current {
                    let max_step = step.iter().fold(0.0f64, |m, s| m.max((scale * s).abs()));
                    theta = candidate;
                    current = value;
                    accepted = max_step >= params.tolerance;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        LogisticModel {
            weights: std::array::from_fn(|f| theta[f]),
            intercept: theta[D],
            iterations,
        }
    }

    /// The linear score w·x + intercept.
    pub fn decision_value(&self, r: &PatientRecord) -> f64 {
        let mut z = self.intercept;
        for f in 0..D {
            z += self.weights[f] * r.feature(f);
        }
        z
    }

    /// Predicted probability of class 1.
    pub fn probability(&self, r: &PatientRecord) -> f64 {
        sigmoid(self.decision_value(r))
    }

    pub fn predict(&self, r: &PatientRecord) -> u8 {
        (self.decision_value(r) > 0.0) as u8
    }
}
