//! Confusion-matrix bookkeeping and the four derived scores.
//!
//! The positive class is `cardio = 1` (disease present). Every score is an
//! exact ratio of confusion counts, kept as integers so that display
//! rounding and cross-checks never pick up float noise:
//!
//! ```text
//! accuracy  = (TP + TN) / (TP + TN + FP + FN)
//! precision = TP / (TP + FP)
//! recall    = TP / (TP + FN)
//! f-measure = 2 * precision * recall / (precision + recall)
//! ```
//!
//! A score whose denominator is zero is [`MetricValue::Undefined`], never a
//! silent 0.0.

use std::fmt;
use std::ops::AddAssign;

/// Prediction tallies against the positive class `cardio = 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    /// Predicted positive, actually positive.
    pub tp: u64,
    /// Predicted positive, actually negative.
    pub fp: u64,
    /// Predicted negative, actually positive.
    pub fn_: u64,
    /// Predicted negative, actually negative.
    pub tn: u64,
}

impl ConfusionMatrix {
    /// Tally `(actual, predicted)` label pairs.
    pub fn from_pairs<I: IntoIterator<Item = (u8, u8)>>(pairs: I) -> Self {
        let mut m = ConfusionMatrix::default();
        for (actual, predicted) in pairs {
            m.record(actual, predicted);
        }
        m
    }

    pub fn record(&mut self, actual: u8, predicted: u8) {
        match (actual, predicted) {
            (1, 1) => self.tp += 1,
            (0, 1) => self.fp += 1,
            (1, 0) => self.fn_ += 1,
            (0, 0) => self.tn += 1,
            _ => panic!("labels must be 0 or 1, got actual={actual} predicted={predicted}"),
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn scores(&self) -> MetricSet {
        MetricSet::from_confusion(self)
    }
}

impl AddAssign for ConfusionMatrix {
    fn add_assign(&mut self, rhs: Self) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
        self.tn += rhs.tn;
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TP: {}  FP: {}  FN: {}  TN: {}",
            self.tp, self.fp, self.fn_, self.tn
        )
    }
}

/// An exact non-negative fraction of confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Numerator scaled to thousandths, rounded half-up, by integer
    /// arithmetic only: round(n/d * 1000) = floor((2000n + d) / 2d).
    fn thousandths(&self) -> u64 {
        let n = self.num as u128;
        let d = self.den as u128;
        ((2000 * n + d) / (2 * d)) as u64
    }
}

impl fmt::Display for Ratio {
    /// Three decimals, round half up.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.thousandths();
        write!(f, "{}.{:03}", m / 1000, m % 1000)
    }
}

/// A score that may lack a value when its denominator is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricValue {
    Defined(Ratio),
    Undefined,
}

impl MetricValue {
    fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            MetricValue::Undefined
        } else {
            MetricValue::Defined(Ratio { num, den })
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, MetricValue::Defined(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            MetricValue::Defined(r) => Some(r.value()),
            MetricValue::Undefined => None,
        }
    }

    /// The value, or a panic naming the score — for callers that have
    /// already established definedness.
    pub fn expect_value(&self, what: &str) -> f64 {
        self.value()
            .unwrap_or_else(|| panic!("{what} is undefined (empty denominator)"))
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Defined(r) => r.fmt(f),
            MetricValue::Undefined => f.write_str("undefined"),
        }
    }
}

/// The four scores of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSet {
    pub accuracy: MetricValue,
    pub precision: MetricValue,
    pub recall: MetricValue,
    pub f_measure: MetricValue,
}

impl MetricSet {
    pub fn from_confusion(m: &ConfusionMatrix) -> Self {
        // The harmonic mean 2PR/(P+R) needs P and R defined with P+R > 0;
        // all three conditions reduce to TP > 0, and the value simplifies to
        // the exact ratio 2*TP / (2*TP + FP + FN).
        let f_measure = if m.tp > 0 {
            MetricValue::ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn_)
        } else {
            MetricValue::Undefined
        };
        MetricSet {
            accuracy: MetricValue::ratio(m.tp + m.tn, m.total()),
            precision: MetricValue::ratio(m.tp, m.tp + m.fp),
            recall: MetricValue::ratio(m.tp, m.tp + m.fn_),
            f_measure,
        }
    }

    /// Scores in report order with their column names.
    pub fn named(&self) -> [(&'static str, MetricValue); 4] {
        [
            ("accuracy", self.accuracy),
            ("precision", self.precision),
            ("recall", self.recall),
            ("f_measure", self.f_measure),
        ]
    }
}
