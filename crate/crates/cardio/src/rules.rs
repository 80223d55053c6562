//! Decision-tree rule extraction and rule-based classification.
//!
//! Every root-to-leaf path of a trained tree becomes one conjunctive rule:
//! numeric and binary branch conditions are copied verbatim (left → `<=`,
//! right → `>`), while one-vs-rest categorical branches are consolidated into
//! explicit equality alternatives, since the rule vocabulary has no "not
//! equal". A right branch that leaves several category values possible at the
//! leaf therefore expands into one rule per remaining value; such leaves
//! produce more than one rule, all adjacent and mutually exclusive.
//!
//! Classification takes the consequent of the first matching rule. Rules
//! extracted from one tree are mutually exclusive and cover every valid
//! record, so the first match is the only match and the fallback class is
//! never consulted; it exists for hand-written or truncated rule sets.

use std::fmt;

use crate::data::{category_values, Dataset, FeatureKind, PatientRecord, FEATURE_KINDS, PREDICTORS};
use crate::learners::tree::{DecisionTree, Node, SplitTest};

/// Comparison operator of a single rule atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    /// Attribute equals the value exactly.
    Eq,
    /// Attribute is less than or equal to the value.
    Le,
    /// Attribute is strictly greater than the value.
    Gt,
}

/// One comparison in a rule antecedent: `attribute <op> value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleAtom {
    /// Index into [`PREDICTORS`].
    pub feature: usize,
    pub comparator: Comparator,
    pub value: f64,
}

impl RuleAtom {
    pub fn matches(&self, feature_value: f64) -> bool {
        match self.comparator {
            Comparator::Eq => feature_value == self.value,
            Comparator::Le => feature_value <= self.value,
            Comparator::Gt => feature_value > self.value,
        }
    }
}

impl fmt::Display for RuleAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.comparator {
            Comparator::Eq => "=",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
        };
        write!(f, "{} {op} {}", PREDICTORS[self.feature], self.value)
    }
}

/// Human-readable name of a class value (1 = presence of disease).
pub fn class_name(class: u8) -> &'static str {
    if class == 1 {
        "presence"
    } else {
        "absence"
    }
}

/// A conjunctive rule: all atoms must hold for the consequent class to fire.
/// An empty antecedent is the always-true rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SwrlRule {
    pub atoms: Vec<RuleAtom>,
    /// Predicted class: 1 = presence, 0 = absence.
    pub consequent: u8,
}

impl SwrlRule {
    pub fn matches(&self, r: &PatientRecord) -> bool {
        self.matches_values(&std::array::from_fn(|f| r.feature(f)))
    }

    /// Match against a bare predictor vector (no outcome field in sight).
    pub fn matches_values(&self, values: &[f64; PREDICTORS.len()]) -> bool {
        self.atoms.iter().all(|a| a.matches(values[a.feature]))
    }
}

impl fmt::Display for SwrlRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IF ")?;
        if self.atoms.is_empty() {
            write!(f, "TRUE")?;
        } else {
            for (i, atom) in self.atoms.iter().enumerate() {
                if i > 0 {
                    write!(f, " AND ")?;
                }
                write!(f, "{atom}")?;
            }
        }
        write!(f, " THEN {}", class_name(self.consequent))
    }
}

/// An ordered rule list with a fallback class for records no rule covers.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub rules: Vec<SwrlRule>,
    /// Class returned when no rule matches.
    pub default_class: u8,
    /// Fingerprint of the tree the rules came from (empty for hand-written sets).
    pub source: String,
}

/// Outcome of classifying one record with a [`RuleSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleDecision {
    pub class: u8,
    /// True when no rule matched and the default class was used.
    pub fell_back: bool,
}

impl RuleSet {
    /// First-match classification with an explicit fallback flag.
    pub fn decide(&self, r: &PatientRecord) -> RuleDecision {
        self.decide_values(&std::array::from_fn(|f| r.feature(f)))
    }

    /// [`decide`](RuleSet::decide) over a bare predictor vector.
    pub fn decide_values(&self, values: &[f64; PREDICTORS.len()]) -> RuleDecision {
        for rule in &self.rules {
            if rule.matches_values(values) {
                return RuleDecision {
                    class: rule.consequent,
                    fell_back: false,
                };
            }
        }
        RuleDecision {
            class: self.default_class,
            fell_back: true,
        }
    }

    /// Classify a whole dataset; the second result is how many records fell
    /// back to the default class.
    pub fn classify_batch(&self, d: &Dataset) -> (Vec<u8>, usize) {
        let mut fallbacks = 0;
        let classes = d
            .records
            .iter()
            .map(|r| {
                let decision = self.decide(r);
                fallbacks += usize::from(decision.fell_back);
                decision.class
            })
            .collect();
        (classes, fallbacks)
    }

    /// One rule per line, `IF ... THEN ...` form.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for rule in &self.rules {
            out.push_str(&rule.to_string());
            out.push('\n');
        }
        out
    }
}

/// Classify one record: the consequent of the first matching rule, or the
/// default class when nothing matches.
pub fn classify_with_rules(rules: &RuleSet, r: &PatientRecord) -> u8 {
    rules.decide(r).class
}

/// Constraint trail along one root-to-leaf path. Numeric and binary
/// comparisons are kept in place; a categorical feature contributes a single
/// slot at its first test, refined by every later test on the same feature.
#[derive(Clone)]
enum PathStep {
    Verbatim(RuleAtom),
    CategorySlot(usize),
}

#[derive(Clone)]
struct Path {
    steps: Vec<PathStep>,
    /// Remaining possible values per feature; `None` = unconstrained.
    remaining: [Option<Vec<f64>>; PREDICTORS.len()],
}

impl Path {
    fn new() -> Path {
        Path {
            steps: Vec::new(),
            remaining: Default::default(),
        }
    }

    /// Record one branch decision.
    fn constrain(&mut self, feature: usize, test: &SplitTest, went_left: bool) {
        match (FEATURE_KINDS[feature], test) {
            (FeatureKind::Categorical, SplitTest::Eq(v)) => {
                if self.remaining[feature].is_none() {
                    self.steps.push(PathStep::CategorySlot(feature));
                    self.remaining[feature] =
                        Some(category_values(feature).iter().map(|v| *v as f64).collect());
                }
                let set = self.remaining[feature].as_mut().unwrap();
                if went_left {
                    set.retain(|x| x == v);
                } else {
                    set.retain(|x| x != v);
                }
            }
            (_, test) => {
                let (comparator, value) = match (test, went_left) {
                    (SplitTest::Le(v), true) => (Comparator::Le, *v),
                    (SplitTest::Le(v), false) => (Comparator::Gt, *v),
                    // equality splits on non-categorical features do not
                    // occur in grown trees, but loaded ones may carry them
                    (SplitTest::Eq(v), true) => (Comparator::Eq, *v),
                    (SplitTest::Eq(v), false) => {
                        // inexpressible without a not-equal comparator; treat
                        // the feature as categorical over its observed value
                        debug_assert!(false, "not-equal branch on non-categorical feature");
                        (Comparator::Gt, *v)
                    }
                };
                self.steps.push(PathStep::Verbatim(RuleAtom {
                    feature,
                    comparator,
                    value,
                }));
            }
        }
    }

    /// Emit the rules for a leaf reached through this path: the cartesian
    /// product over every categorical slot's remaining values, in slot order
    /// with values ascending, one rule per combination.
    fn emit(&self, consequent: u8, out: &mut Vec<SwrlRule>) {
        let slots: Vec<usize> = self
            .steps
            .iter()
            .filter_map(|s| match s {
                PathStep::CategorySlot(f) => Some(*f),
                PathStep::Verbatim(_) => None,
            })
            .collect();
        if slots
            .iter()
            .any(|f| self.remaining[*f].as_ref().is_some_and(Vec::is_empty))
        {
            // a value-exhausted branch: no record can reach it, grown trees
            // never produce it
            debug_assert!(false, "leaf behind an exhausted category branch");
            return;
        }
        let mut choice = vec![0usize; slots.len()];
        loop {
            let atoms = self
                .steps
                .iter()
                .map(|s| match s {
                    PathStep::Verbatim(a) => *a,
                    PathStep::CategorySlot(f) => {
                        let slot = slots.iter().position(|x| x == f).unwrap();
                        RuleAtom {
                            feature: *f,
                            comparator: Comparator::Eq,
                            value: self.remaining[*f].as_ref().unwrap()[choice[slot]],
                        }
                    }
                })
                .collect();
            out.push(SwrlRule { atoms, consequent });
            // advance the rightmost slot; carry leftward
            let mut i = slots.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < self.remaining[slots[i]].as_ref().unwrap().len() {
                    break;
                }
                choice[i] = 0;
            }
        }
    }
}

/// Convert a trained tree into rules, one per leaf in left-to-right leaf
/// order (more than one per leaf when a categorical "not equal" branch must
/// expand into its remaining equality alternatives).
pub fn extract_rules(tree: &DecisionTree) -> RuleSet {
    let mut rules = Vec::new();
    // (node index, path so far); right child pushed first so the left is
    // processed first and leaves emit left-to-right
    let mut stack = vec![(0usize, Path::new())];
    while let Some((node, path)) = stack.pop() {
        match &tree.nodes[node] {
            Node::Leaf { class, .. } => path.emit(*class, &mut rules),
            Node::Split {
                feature,
                test,
                left,
                right,
            } => {
                let mut left_path = path.clone();
                left_path.constrain(*feature, test, true);
                let mut right_path = path;
                right_path.constrain(*feature, test, false);
                stack.push((*right, right_path));
                stack.push((*left, left_path));
            }
        }
    }
    RuleSet {
        rules,
        default_class: tree.majority_class,
        source: format!("{:016x}", tree.fingerprint()),
    }
}
