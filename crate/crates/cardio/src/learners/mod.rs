//! The seven classifiers behind a uniform train/predict interface.
//!
//! Every learner consumes [`PatientRecord`]s directly; any internal feature
//! scaling (z-score in the SVM, min-max in the MLP) lives inside the trained
//! model and never mutates records. Training is deterministic for a fixed
//! `(algorithm, train_set, params)` — stochastic learners derive all
//! randomness from `HyperParams::seed`.

pub mod bayes;
pub mod forest;
pub mod knn;
pub mod logistic;
pub mod mlp;
pub mod persist;
pub mod svm;
pub mod tree;

use crate::data::{Dataset, PatientRecord};
use thiserror::Error;

pub use bayes::BayesModel;
pub use forest::RandomForest;
pub use knn::KnnModel;
pub use logistic::LogisticModel;
pub use mlp::MlpModel;
pub use svm::SvmModel;
pub use tree::DecisionTree;

/// The seven classification algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    DecisionTree,
    RandomForest,
    LogisticRegression,
    NaiveBayes,
    Knn,
    LinearSvm,
    Mlp,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 7] = [
        AlgorithmId::Knn,
        AlgorithmId::NaiveBayes,
        AlgorithmId::Mlp,
        AlgorithmId::LinearSvm,
        AlgorithmId::RandomForest,
        AlgorithmId::LogisticRegression,
        AlgorithmId::DecisionTree,
    ];

    /// Short name used in CLI flags, report files, and model files.
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmId::DecisionTree => "dt",
            AlgorithmId::RandomForest => "rf",
            AlgorithmId::LogisticRegression => "lr",
            AlgorithmId::NaiveBayes => "nb",
            AlgorithmId::Knn => "knn",
            AlgorithmId::LinearSvm => "svm",
            AlgorithmId::Mlp => "ann",
        }
    }

    /// Parse a user-supplied name; accepts both short and long spellings.
    pub fn parse(name: &str) -> Option<AlgorithmId> {
        match name.trim().to_ascii_lowercase().as_str() {
            "dt" | "decision_tree" | "tree" => Some(AlgorithmId::DecisionTree),
            "rf" | "random_forest" | "forest" => Some(AlgorithmId::RandomForest),
            "lr" | "logistic_regression" | "logistic" => Some(AlgorithmId::LogisticRegression),
            "nb" | "naive_bayes" | "bayes" => Some(AlgorithmId::NaiveBayes),
            "knn" | "k_nearest_neighbors" => Some(AlgorithmId::Knn),
            "svm" | "linear_svm" => Some(AlgorithmId::LinearSvm),
            "ann" | "mlp" | "neural_network" => Some(AlgorithmId::Mlp),
            _ => None,
        }
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Hyperparameters for all algorithms in one bag; each learner reads only
/// its own fields. Every run records the relevant subset for reproducibility.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    /// Root seed for stochastic learners (forest sampling, mlp init).
    pub seed: u64,

    // decision tree
    /// Smallest admissible child node, in records.
    pub min_leaf: usize,
    /// Depth cap; `None` grows until purity or min_leaf stops a branch.
    pub max_depth: Option<usize>,
    /// Split on gain ratio instead of raw information gain.
    pub use_gain_ratio: bool,

    // random forest
    pub n_trees: usize,
    /// Features drawn per split; `None` means ceil(sqrt(feature count)).
    pub mtry: Option<usize>,
    pub bootstrap: bool,

    // logistic regression
    pub ridge: f64,
    pub tolerance: f64,
    pub max_iterations: usize,

    // naive bayes
    pub laplace: f64,
    pub variance_floor: f64,

    // k-nearest neighbors
    pub k: usize,

    // linear svm
    pub svm_c: f64,
    pub svm_epochs: usize,
    pub svm_learning_rate: f64,

    // mlp
    pub hidden_units: usize,
    pub mlp_learning_rate: f64,
    pub momentum: f64,
    pub mlp_epochs: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            seed: 1,
            min_leaf: 2,
            max_depth: None,
            use_gain_ratio: false,
            n_trees: 100,
            mtry: None,
            bootstrap: true,
            ridge: 1e-8,
            tolerance: 1e-8,
            max_iterations: 50,
            laplace: 1.0,
            variance_floor: 1e-9,
            k: 1,
            svm_c: 1.0,
            svm_epochs: 150,
            svm_learning_rate: 0.5,
            hidden_units: 7,
            mlp_learning_rate: 0.3,
            momentum: 0.2,
            mlp_epochs: 500,
        }
    }
}

impl HyperParams {
    /// The fields `algorithm` actually reads, rendered `key=value` for
    /// reports.
    pub fn describe(&self, algorithm: AlgorithmId) -> String {
        let depth = match self.max_depth {
            Some(d) => d.to_string(),
            None => "none".to_string(),
        };
        match algorithm {
            AlgorithmId::DecisionTree => format!(
                "min_leaf={} max_depth={} use_gain_ratio={}",
                self.min_leaf, depth, self.use_gain_ratio
            ),
            AlgorithmId::RandomForest => format!(
                "n_trees={} mtry={} bootstrap={} min_leaf={} max_depth={} seed={}",
                self.n_trees,
                match self.mtry {
                    Some(m) => m.to_string(),
                    None => "sqrt".to_string(),
                },
                self.bootstrap,
                self.min_leaf,
                depth,
                self.seed
            ),
            AlgorithmId::LogisticRegression => format!(
                "ridge={} tolerance={} max_iterations={}",
                self.ridge, self.tolerance, self.max_iterations
            ),
            AlgorithmId::NaiveBayes => format!(
                "laplace={} variance_floor={}",
                self.laplace, self.variance_floor
            ),
            AlgorithmId::Knn => format!("k={}", self.k),
            AlgorithmId::LinearSvm => format!(
                "c={} epochs={} learning_rate={}",
                self.svm_c, self.svm_epochs, self.svm_learning_rate
            ),
            AlgorithmId::Mlp => format!(
                "hidden_units={} learning_rate={} momentum={} epochs={} seed={}",
                self.hidden_units,
                self.mlp_learning_rate,
                self.momentum,
                self.mlp_epochs,
                self.seed
            ),
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        fn positive(name: &str, ok: bool) -> Result<(), TrainError> {
            if ok {
                Ok(())
            } else {
                Err(TrainError::BadHyperParam(format!("{name} must be positive")))
            }
        }
        positive("min_leaf", self.min_leaf > 0)?;
        positive("n_trees", self.n_trees > 0)?;
        positive("ridge", self.ridge > 0.0)?;
        positive("tolerance", self.tolerance > 0.0)?;
        positive("max_iterations", self.max_iterations > 0)?;
        positive("laplace", self.laplace > 0.0)?;
        positive("variance_floor", self.variance_floor > 0.0)?;
        positive("k", self.k > 0)?;
        positive("c", self.svm_c > 0.0)?;
        positive("svm epochs", self.svm_epochs > 0)?;
        positive("svm learning_rate", self.svm_learning_rate > 0.0)?;
        positive("hidden_units", self.hidden_units > 0)?;
        positive("mlp learning_rate", self.mlp_learning_rate > 0.0)?;
        positive("mlp epochs", self.mlp_epochs > 0)?;
        if let Some(m) = self.mtry {
            positive("mtry", m > 0)?;
        }
        if self.momentum < 0.0 || self.momentum >= 1.0 {
            return Err(TrainError::BadHyperParam(
                "momentum must be in [0, 1)".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("cannot train {algorithm} on an empty training set")]
    EmptySet { algorithm: AlgorithmId },
    #[error("cannot train {algorithm}: every training record has class {class}; a discriminative learner needs both classes")]
    SingleClass { algorithm: AlgorithmId, class: u8 },
    #[error("invalid hyperparameter: {0}")]
    BadHyperParam(String),
}

/// A trained classifier; immutable, and `predict` is a pure function.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Tree(DecisionTree),
    Forest(RandomForest),
    Logistic(LogisticModel),
    Bayes(BayesModel),
    Knn(KnnModel),
    Svm(SvmModel),
    Mlp(MlpModel),
}

impl TrainedModel {
    pub fn algorithm(&self) -> AlgorithmId {
        match self {
            TrainedModel::Tree(_) => AlgorithmId::DecisionTree,
            TrainedModel::Forest(_) => AlgorithmId::RandomForest,
            TrainedModel::Logistic(_) => AlgorithmId::LogisticRegression,
            TrainedModel::Bayes(_) => AlgorithmId::NaiveBayes,
            TrainedModel::Knn(_) => AlgorithmId::Knn,
            TrainedModel::Svm(_) => AlgorithmId::LinearSvm,
            TrainedModel::Mlp(_) => AlgorithmId::Mlp,
        }
    }

    pub fn predict(&self, record: &PatientRecord) -> u8 {
        match self {
            TrainedModel::Tree(m) => m.predict(record),
            TrainedModel::Forest(m) => m.predict(record),
            TrainedModel::Logistic(m) => m.predict(record),
            TrainedModel::Bayes(m) => m.predict(record),
            TrainedModel::Knn(m) => m.predict(record),
            TrainedModel::Svm(m) => m.predict(record),
            TrainedModel::Mlp(m) => m.predict(record),
        }
    }

    /// Elementwise [`Self::predict`] in dataset order.
    pub fn predict_batch(&self, records: &Dataset) -> Vec<u8> {
        records.records.iter().map(|r| self.predict(r)).collect()
    }
}

/// Train `algorithm` on `train_set`.
///
/// Discriminative learners (logistic regression, svm, mlp) reject
/// single-class training sets; the tree family, naive bayes, and knn
/// degrade gracefully to constant or single-class models.
pub fn train(
    algorithm: AlgorithmId,
    train_set: &Dataset,
    params: &HyperParams,
) -> Result<TrainedModel, TrainError> {
    params.validate()?;
    if train_set.is_empty() {
        return Err(TrainError::EmptySet { algorithm });
    }
    let (n0, n1) = train_set.class_counts();
    let single_class = if n0 == 0 {
        Some(1u8)
    } else if n1 == 0 {
        Some(0u8)
    } else {
        None
    };
    if let Some(class) = single_class {
        if matches!(
            algorithm,
            AlgorithmId::LogisticRegression | AlgorithmId::LinearSvm | AlgorithmId::Mlp
        ) {
            return Err(TrainError::SingleClass { algorithm, class });
        }
    }
    Ok(match algorithm {
        AlgorithmId::DecisionTree => TrainedModel::Tree(tree::DecisionTree::train(train_set, params)),
        AlgorithmId::RandomForest => {
            TrainedModel::Forest(forest::RandomForest::train(train_set, params))
        }
        AlgorithmId::LogisticRegression => {
            TrainedModel::Logistic(logistic::LogisticModel::train(train_set, params))
        }
        AlgorithmId::NaiveBayes => TrainedModel::Bayes(bayes::BayesModel::train(train_set, params)),
        AlgorithmId::Knn => TrainedModel::Knn(knn::KnnModel::train(train_set, params)),
        AlgorithmId::LinearSvm => TrainedModel::Svm(svm::SvmModel::train(train_set, params)),
        AlgorithmId::Mlp => TrainedModel::Mlp(mlp::MlpModel::train(train_set, params)),
    })
}

/// Derive an independent sub-seed from a root seed and an index
/// (per-tree, per-fold, ...). SplitMix64 finalizer: distinct inputs give
/// well-separated streams, and the mapping is pure.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;

    pub(crate) fn record(
        age: i64,
        ap_hi: i64,
        cholesterol: u8,
        cardio: u8,
    ) -> crate::data::PatientRecord {
        crate::data::PatientRecord {
            age,
            gender: 1,
            height: 165,
            weight: 70.0,
            ap_hi,
            ap_lo: ap_hi - 40,
            cholesterol,
            gluc: 1,
            smoke: 0,
            alco: 0,
            active: 1,
            cardio,
        }
    }

    fn toy_set() -> Dataset {
        Dataset::from_records(vec![
            record(15000, 100, 1, 0),
            record(16000, 110, 1, 0),
            record(17000, 150, 2, 1),
            record(18000, 160, 3, 1),
        ])
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in AlgorithmId::ALL {
            assert_eq!(AlgorithmId::parse(a.name()), Some(a));
        }
        assert_eq!(AlgorithmId::parse("decision_tree"), Some(AlgorithmId::DecisionTree));
        assert_eq!(AlgorithmId::parse("MLP"), Some(AlgorithmId::Mlp));
        assert_eq!(AlgorithmId::parse("quantum"), None);
    }

    #[test]
    fn empty_training_set_is_an_error_for_every_algorithm() {
        let empty = Dataset::default();
        for a in AlgorithmId::ALL {
            assert!(matches!(
                train(a, &empty, &HyperParams::default()),
                Err(TrainError::EmptySet { .. })
            ));
        }
    }

    #[test]
    fn single_class_rejected_only_by_discriminative_learners() {
        let records = (0..5).map(|i| record(15000 + i, 120, 1, 1)).collect();
        let single = Dataset::from_records(records);
        let p = HyperParams::default();
        for a in [
            AlgorithmId::LogisticRegression,
            AlgorithmId::LinearSvm,
            AlgorithmId::Mlp,
        ] {
            assert!(matches!(
                train(a, &single, &p),
                Err(TrainError::SingleClass { class: 1, .. })
            ));
        }
        for a in [
            AlgorithmId::DecisionTree,
            AlgorithmId::RandomForest,
            AlgorithmId::NaiveBayes,
            AlgorithmId::Knn,
        ] {
            let m = train(a, &single, &p).unwrap();
            assert_eq!(m.predict(&record(16000, 130, 2, 0)), 1);
        }
    }

    #[test]
    fn predict_batch_equals_elementwise_predict() {
        let d = toy_set();
        let p = HyperParams::default();
        for a in AlgorithmId::ALL {
            let m = train(a, &d, &p).unwrap();
            let batch = m.predict_batch(&d);
            let single: Vec<u8> = d.records.iter().map(|r| m.predict(r)).collect();
            assert_eq!(batch, single, "{a}");
            assert_eq!(m.predict_batch(&Dataset::default()), Vec::<u8>::new());
        }
    }

    #[test]
    fn every_learner_fits_the_separable_toy_set() {
        // All seven must beat or tie the majority baseline (0.5 here) on
        // their own training data; the toy set is linearly separable.
        let d = toy_set();
        let p = HyperParams::default();
        for a in AlgorithmId::ALL {
            let m = train(a, &d, &p).unwrap();
            let correct = d
                .records
                .iter()
                .filter(|r| m.predict(r) == r.cardio)
                .count();
            assert!(correct >= 2, "{a} scored {correct}/4 on its training set");
        }
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let mut records = Vec::new();
        for i in 0..80 {
            let r = record(
                14000 + 37 * i,
                100 + 10 * (i % 8),
                1 + (i % 3) as u8,
                ((i % 8) >= 4) as u8,
            );
            records.push(r);
        }
        let d = Dataset::from_records(records);
        let probes = toy_set();
        for a in AlgorithmId::ALL {
            let p = HyperParams::default();
            let m1 = train(a, &d, &p).unwrap();
            let m2 = train(a, &d, &p).unwrap();
            assert_eq!(
                m1.predict_batch(&probes),
                m2.predict_batch(&probes),
                "{a} is not deterministic"
            );
        }
    }

    #[test]
    fn derived_seeds_are_distinct_and_stable() {
        let a = derive_seed(1, 0);
        let b = derive_seed(1, 1);
        let c = derive_seed(2, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(derive_seed(1, 0), a);
    }
}
