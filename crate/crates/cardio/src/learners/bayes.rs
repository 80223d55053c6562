//! Gaussian/categorical naive Bayes.
//!
//! Numeric attributes get a per-class Gaussian (sample variance, floored);
//! categorical and {0,1} attributes get Laplace-smoothed frequency tables.
//! Priors are unsmoothed class frequencies. Scoring runs in log space; the
//! larger posterior wins, ties preferring class 0.

use crate::data::{category_values, Dataset, FeatureKind, PatientRecord, FEATURE_KINDS, PREDICTORS};
use crate::learners::HyperParams;

const D: usize = PREDICTORS.len();

#[derive(Debug, Clone, PartialEq)]
pub struct BayesModel {
    /// ln P(class); -inf for a class absent from training.
    pub log_priors: [f64; 2],
    /// Per feature, per class: (mean, variance) for numeric features.
    pub gaussians: [[(f64, f64); 2]; D],
    /// Per feature, per class, per category index: ln P(value | class).
    pub log_tables: [[[f64; 3]; 2]; D],
}

impl BayesModel {
    pub fn train(d: &Dataset, params: &HyperParams) -> BayesModel {
        let n = d.len() as f64;
        let mut counts = [0usize; 2];
        for r in &d.records {
            counts[r.cardio as usize] += 1;
        }
        let log_priors =
            [0, 1].map(|c| if counts[c] == 0 { f64::NEG_INFINITY } else { (counts[c] as f64 / n).ln() });

        let mut gaussians = [[(0.0, 0.0); 2]; D];
        let mut log_tables = [[[0.0; 3]; 2]; D];
        for f in 0..D {
            match FEATURE_KINDS[f] {
                FeatureKind::Numeric => {
                    for c in 0..2usize {
                        let values: Vec<f64> = d
                            .records
                            .iter()
                            .filter(|r| r.cardio as usize == c)
                            .map(|r| r.feature(f))
                            .collect();
                        if values.is_empty() {
                            gaussians[f][c] = (0.0, params.variance_floor);
                            continue;
                        }
                        let m = values.iter().sum::<f64>() / values.len() as f64;
                        let var = if values.len() > 1 {
                            values.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
                                / (values.len() - 1) as f64
                        } else {
                            0.0
                        };
                        gaussians[f][c] = (m, var.max(params.variance_floor));
                    }
                }
                FeatureKind::Binary | FeatureKind::Categorical => {
                    let domain = category_values(f);
                    for c in 0..2usize {
                        let mut per_value = [0usize; 3];
                        let mut total = 0usize;
                        for r in &d.records {
                            if r.cardio as usize == c {
                                let pos =
                                    domain.iter().position(|v| *v as f64 == r.feature(f)).unwrap();
                                per_value[pos] += 1;
                                total += 1;
                            }
                        }
                        let denom = total as f64 + params.laplace * domain.len() as f64;
                        for (v, &cnt) in per_value.iter().enumerate().take(domain.len()) {
                            log_tables[f][c][v] = ((cnt as f64 + params.laplace) / denom).ln();
                        }
                    }
                }
            }
        }
        BayesModel {
            log_priors,
            gaussians,
            log_tables,
        }
    }

    /// ln P(class) + ln P(record | class) for both classes.
    pub fn log_posteriors(&self, r: &PatientRecord) -> [f64; 2] {
        let mut scores = self.log_priors;
        for (c, score) in scores.iter_mut().enumerate() {
            if !score.is_finite() {
                continue;
            }
            for f in 0..D {
                let x = r.feature(f);
                match FEATURE_KINDS[f] {
                    FeatureKind::Numeric => {
                        let (mean, var) = self.gaussians[f][c];
                        *score += -0.5 * (2.0 * std::f64::consts::PI * var).ln()
                            - (x - mean) * (x - mean) / (2.0 * var);
                    }
                    FeatureKind::Binary | FeatureKind::Categorical => {
                        let domain = category_values(f);
                        match domain.iter().position(|v| *v as f64 == x) {
                            Some(pos) => *score += self.log_tables[f][c][pos],
                            // a value outside the training domain contributes
                            // nothing to either class
                            None => {}
                        }
                    }
                }
            }
        }
        scores
    }

    pub fn predict(&self, r: &PatientRecord) -> u8 {
        let s = self.log_posteriors(r);
        (s[1] > s[0]) as u8
    }
}
