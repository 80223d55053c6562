//! Evaluation protocols and the cross-classifier comparison table.
//!
//! Two protocols: a seeded percentage split (train on the first cut, score
//! the remainder) and stratified k-fold cross-validation, where the per-fold
//! confusion matrices are pooled before any metric is computed. Every report
//! stores its confusion matrix, so the published-style table can always be
//! recomputed from counts.
//!
//! The `Ontology` classifier is the rule pipeline measured end to end: train
//! a tree on the training partition, extract its rules, build an ontology
//! over the *test* records, run inference, and score the inferred classes
//! against the recorded outcomes.

use std::fmt;
use std::time::{Duration, Instant};

use crate::data::{percentage_split, stratified_folds, DataError, Dataset, SplitSpec};
use crate::learners::{derive_seed, train, AlgorithmId, HyperParams, TrainError, TrainedModel};
use crate::metrics::{ConfusionMatrix, MetricSet, MetricValue};
use crate::ontology::{build_ontology, infer, inferred_vs_recorded};
use crate::rules::extract_rules;
use thiserror::Error;

/// A thing that can be benchmarked: one of the seven learners, or the
/// tree-to-rules-to-inference pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierId {
    Algorithm(AlgorithmId),
    Ontology,
}

impl ClassifierId {
    pub const ALL: [ClassifierId; 8] = [
        ClassifierId::Algorithm(AlgorithmId::Knn),
        ClassifierId::Algorithm(AlgorithmId::NaiveBayes),
        ClassifierId::Algorithm(AlgorithmId::Mlp),
        ClassifierId::Algorithm(AlgorithmId::LinearSvm),
        ClassifierId::Algorithm(AlgorithmId::RandomForest),
        ClassifierId::Algorithm(AlgorithmId::LogisticRegression),
        ClassifierId::Algorithm(AlgorithmId::DecisionTree),
        ClassifierId::Ontology,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClassifierId::Algorithm(a) => a.name(),
            ClassifierId::Ontology => "ontology",
        }
    }

    pub fn parse(text: &str) -> Option<ClassifierId> {
        if text.eq_ignore_ascii_case("ontology") {
            return Some(ClassifierId::Ontology);
        }
        AlgorithmId::parse(text).map(ClassifierId::Algorithm)
    }
}

impl fmt::Display for ClassifierId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which evaluation protocol produced a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    /// k-fold cross-validation, pooled confusion matrix.
    Folds(usize),
    /// Percentage split; the value is the training fraction.
    Split(f64),
}

impl Protocol {
    /// Stable label, e.g. `folds-10` or `split-60`.
    pub fn label(&self) -> String {
        match self {
            Protocol::Folds(k) => format!("folds-{k}"),
            Protocol::Split(fraction) => format!("split-{:.0}", fraction * 100.0),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Everything one benchmark run produced.
#[derive(Debug, Clone)]
pub struct EvaluationReport {
    pub classifier: ClassifierId,
    pub protocol: Protocol,
    pub confusion: ConfusionMatrix,
    pub scores: MetricSet,
    pub hyperparams: String,
    pub seed: u64,
    pub wall_time: Duration,
}

impl EvaluationReport {
    /// Plain-text rendering for report files; metrics shown at 3 decimals
    /// and recomputable from the embedded confusion counts.
    pub fn render(&self) -> String {
        let m = &self.confusion;
        format!(
            "classifier: {}\nprotocol: {}\nseed: {}\nhyperparameters: {}\n\
             confusion: TP={} FP={} FN={} TN={}\naccuracy: {}\nprecision: {}\n\
             recall: {}\nf_measure: {}\nwall_time_ms: {}\n",
            self.classifier,
            self.protocol,
            self.seed,
            self.hyperparams,
            m.tp,
            m.fp,
            m.fn_,
            m.tn,
            self.scores.accuracy,
            self.scores.precision,
            self.scores.recall,
            self.scores.f_measure,
            self.wall_time.as_millis(),
        )
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// Predictions of one classifier over a test partition.
fn test_predictions(
    classifier: ClassifierId,
    train_set: &Dataset,
    test_set: &Dataset,
    params: &HyperParams,
) -> Result<Vec<u8>, EvalError> {
    match classifier {
        ClassifierId::Algorithm(a) => {
            let model = train(a, train_set, params)?;
            Ok(model.predict_batch(test_set))
        }
        ClassifierId::Ontology => {
            let tree = match train(AlgorithmId::DecisionTree, train_set, params)? {
                TrainedModel::Tree(t) => t,
                _ => unreachable!("decision tree training returns a tree"),
            };
            let rules = extract_rules(&tree);
            let mut ontology = build_ontology(test_set);
            infer(&mut ontology, &rules).expect("extracted rules stay within the schema");
            let (inferred, _) = inferred_vs_recorded(&ontology);
            Ok(inferred)
        }
    }
}

fn actuals(d: &Dataset) -> Vec<u8> {
    d.records.iter().map(|r| r.cardio).collect()
}

/// Train on the `spec.train_fraction` cut, score the remainder.
pub fn evaluate_split(
    classifier: ClassifierId,
    d: &Dataset,
    spec: &SplitSpec,
    params: &HyperParams,
) -> Result<EvaluationReport, EvalError> {
    let started = Instant::now();
    let (train_set, test_set) = percentage_split(d, spec, spec.seed)?;
    let predictions = test_predictions(classifier, &train_set, &test_set, params)?;
    let confusion =
        ConfusionMatrix::from_pairs(actuals(&test_set).into_iter().zip(predictions));
    Ok(EvaluationReport {
        classifier,
        protocol: Protocol::Split(spec.train_fraction),
        confusion,
        scores: MetricSet::from_confusion(&confusion),
        hyperparams: params.describe(classifier_algorithm(classifier)),
        seed: spec.seed,
        wall_time: started.elapsed(),
    })
}

/// Stratified k-fold cross-validation with a pooled confusion matrix; each
/// fold trains with its own derived seed so repeated folds are independent
/// but the whole run is reproducible.
pub fn evaluate_cv(
    classifier: ClassifierId,
    d: &Dataset,
    k: usize,
    seed: u64,
    params: &HyperParams,
) -> Result<EvaluationReport, EvalError> {
    let started = Instant::now();
    let folds = stratified_folds(d, k, seed, true)?;
    let mut pooled = ConfusionMatrix::default();
    for (fold_no, test_indices) in folds.iter().enumerate() {
        let mut in_test = vec![false; d.len()];
        for &i in test_indices {
            in_test[i] = true;
        }
        let train_indices: Vec<usize> = (0..d.len()).filter(|i| !in_test[*i]).collect();
        let train_set = d.subset(&train_indices);
        let test_set = d.subset(test_indices);
        let mut fold_params = params.clone();
        fold_params.seed = derive_seed(params.seed, fold_no as u64);
        let predictions = test_predictions(classifier, &train_set, &test_set, &fold_params)?;
        pooled += ConfusionMatrix::from_pairs(actuals(&test_set).into_iter().zip(predictions));
    }
    Ok(EvaluationReport {
        classifier,
        protocol: Protocol::Folds(k),
        confusion: pooled,
        scores: MetricSet::from_confusion(&pooled),
        hyperparams: params.describe(classifier_algorithm(classifier)),
        seed,
        wall_time: started.elapsed(),
    })
}

/// The rule pipeline reuses the tree's hyperparameters.
fn classifier_algorithm(c: ClassifierId) -> AlgorithmId {
    match c {
        ClassifierId::Algorithm(a) => a,
        ClassifierId::Ontology => AlgorithmId::DecisionTree,
    }
}

/// One comparison row: a classifier's metrics under each protocol it ran.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub classifier: ClassifierId,
    pub cv: Option<MetricSet>,
    pub split: Option<MetricSet>,
}

/// The published-style results table.
#[derive(Debug, Clone)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub cv_label: String,
    pub split_label: String,
}

/// Exact ascending order on metric values; undefined sorts first, ties keep
/// name order.
fn metric_ascending(a: &MetricValue, b: &MetricValue) -> std::cmp::Ordering {
    match (a, b) {
        (MetricValue::Undefined, MetricValue::Undefined) => std::cmp::Ordering::Equal,
        (MetricValue::Undefined, MetricValue::Defined(_)) => std::cmp::Ordering::Less,
        (MetricValue::Defined(_), MetricValue::Undefined) => std::cmp::Ordering::Greater,
        (MetricValue::Defined(x), MetricValue::Defined(y)) => {
            let left = x.num as u128 * y.den as u128;
            let right = y.num as u128 * x.den as u128;
            left.cmp(&right)
        }
    }
}

/// Group reports by classifier and sort rows by cross-validation accuracy,
/// ascending (split accuracy for rows that only ran the split protocol).
pub fn compare(reports: &[EvaluationReport]) -> ComparisonTable {
    let mut cv_label = String::from("folds-10");
    let mut split_label = String::from("split-60");
    let mut rows: Vec<ComparisonRow> = Vec::new();
    for report in reports {
        let row = match rows.iter_mut().find(|r| r.classifier == report.classifier) {
            Some(row) => row,
            None => {
                rows.push(ComparisonRow {
                    classifier: report.classifier,
                    cv: None,
                    split: None,
                });
                rows.last_mut().unwrap()
            }
        };
        match report.protocol {
            Protocol::Folds(_) => {
                cv_label = report.protocol.label();
                row.cv = Some(report.scores);
            }
            Protocol::Split(_) => {
                split_label = report.protocol.label();
                row.split = Some(report.scores);
            }
        }
    }
    rows.sort_by(|a, b| {
        let key = |r: &ComparisonRow| {
            r.cv
                .or(r.split)
                .map(|m| m.accuracy)
                .unwrap_or(MetricValue::Undefined)
        };
        metric_ascending(&key(a), &key(b)).then_with(|| a.classifier.name().cmp(b.classifier.name()))
    });
    ComparisonTable {
        rows,
        cv_label,
        split_label,
    }
}

fn cell(m: Option<&MetricSet>, pick: impl Fn(&MetricSet) -> &MetricValue) -> String {
    match m {
        Some(set) => pick(set).to_string(),
        None => "-".to_string(),
    }
}

impl ComparisonTable {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let metrics: [(&str, fn(&MetricSet) -> &MetricValue); 4] = [
            ("Accuracy", |m| &m.accuracy),
            ("Precision", |m| &m.precision),
            ("Recall", |m| &m.recall),
            ("F-Measure", |m| &m.f_measure),
        ];
        out.push_str("| Classifier |");
        for (name, _) in &metrics {
            out.push_str(&format!(" {name} ({}) | {name} ({}) |", self.cv_label, self.split_label));
        }
        out.push('\n');
        out.push_str("|---|");
        out.push_str(&"---|".repeat(8));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("| {} |", row.classifier));
            for (_, pick) in &metrics {
                out.push_str(&format!(
                    " {} | {} |",
                    cell(row.cv.as_ref(), pick),
                    cell(row.split.as_ref(), pick)
                ));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("classifier");
        for metric in ["accuracy", "precision", "recall", "f_measure"] {
            out.push_str(&format!(",{metric}_{},{metric}_{}", self.cv_label, self.split_label));
        }
        out.push('\n');
        let metrics: [fn(&MetricSet) -> &MetricValue; 4] = [
            |m| &m.accuracy,
            |m| &m.precision,
            |m| &m.recall,
            |m| &m.f_measure,
        ];
        for row in &self.rows {
            out.push_str(row.classifier.name());
            for pick in &metrics {
                out.push_str(&format!(
                    ",{},{}",
                    cell(row.cv.as_ref(), pick),
                    cell(row.split.as_ref(), pick)
                ));
            }
            out.push('\n');
        }
        out
    }
}
