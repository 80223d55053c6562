//! k-nearest-neighbor classification over raw Euclidean distance.
//!
//! The model memorizes the training set. Neighbors are compared by squared
//! distance with ties resolved toward the lower training index, and the vote
//! ties toward class 0. Distance accumulation visits features in descending
//! training variance so most candidates cut off early against the current
//! k-th-best distance.

use crate::data::{Dataset, PatientRecord, PREDICTORS};
use crate::learners::HyperParams;

const D: usize = PREDICTORS.len();

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub points: Vec<[f64; D]>,
    pub labels: Vec<u8>,
    pub k: usize,
    /// Feature visit order for early-abandoned accumulation.
    scan_order: [usize; D],
}

impl KnnModel {
    pub fn train(d: &Dataset, params: &HyperParams) -> KnnModel {
        let points: Vec<[f64; D]> = d
            .records
            .iter()
            .map(|r| std::array::from_fn(|f| r.feature(f)))
            .collect();
        let n = points.len() as f64;
        let mut spread: Vec<(f64, usize)> = (0..D)
            .map(|f| {
                let mean = points.iter().map(|p| p[f]).sum::<f64>() / n;
                let var = points.iter().map(|p| (p[f] - mean) * (p[f] - mean)).sum::<f64>() / n;
                (var, f)
            })
            .collect();
        spread.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        KnnModel {
            points,
            labels: d.records.iter().map(|r| r.cardio).collect(),
            k: params.k.min(d.len()),
            scan_order: std::array::from_fn(|i| spread[i].1),
        }
    }

    /// Reassemble a model from stored fields (text deserialization).
    pub fn from_parts(
        points: Vec<[f64; D]>,
        labels: Vec<u8>,
        k: usize,
        scan_order: [usize; D],
    ) -> KnnModel {
        KnnModel {
            points,
            labels,
            k,
            scan_order,
        }
    }

    pub fn scan_order(&self) -> &[usize; D] {
        &self.scan_order
    }

    pub fn predict(&self, r: &PatientRecord) -> u8 {
        let probe: [f64; D] = std::array::from_fn(|f| r.feature(f));
        // ascending (distance, index); worst kept at the back
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(self.k + 1);
        for (i, p) in self.points.iter().enumerate() {
            let cutoff = if best.len() == self.k {
                best[self.k - 1].0
            } else {
                f64::INFINITY
            };
            let mut dist = 0.0;
            for &f in &self.scan_order {
                let diff = probe[f] - p[f];
                dist += diff * diff;
                if dist > cutoff {
                    break;
                }
            }
            if dist > cutoff || (dist == cutoff && best.len() == self.k) {
                continue; // equal distance keeps the earlier index
            }
            let at = best.partition_point(|&(d, _)| d <= dist);
            best.insert(at, (dist, i));
            best.truncate(self.k);
        }
        let ones: usize = best
            .iter()
            .map(|&(_, i)| self.labels[i] as usize)
            .sum();
        (2 * ones > best.len()) as u8
    }
}
