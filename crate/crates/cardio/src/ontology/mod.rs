//! In-memory patient ontology and rule inference.
//!
//! The schema is small and fixed: classes `Patient` and `Diagnostic` with
//! `presence`/`absence` under `Diagnostic`, and one decimal data property per
//! dataset attribute (the eleven predictors plus the recorded `cardio`
//! outcome). Records become individuals; a forward chainer applies a rule set
//! to every individual and asserts the concluded class.
//!
//! Inference deliberately runs on a projection that carries only the eleven
//! predictor properties, so the recorded outcome can never leak into the
//! inferred one — corrupting `cardio` on every individual must not change a
//! single inference.

pub mod swrl;
pub mod turtle;

use std::fmt;

use crate::data::{Dataset, PREDICTORS};
use crate::rules::{class_name, RuleSet};
use thiserror::Error;

pub const CLASS_PATIENT: &str = "Patient";
pub const CLASS_DIAGNOSTIC: &str = "Diagnostic";

/// Names of all data properties, predictors first, then the recorded outcome.
pub fn property_names() -> impl Iterator<Item = &'static str> {
    PREDICTORS.iter().copied().chain(std::iter::once("cardio"))
}

/// One patient instance: asserted attribute values plus the class the
/// reasoner concludes.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    /// Local name such as `patient_00042`.
    pub iri_suffix: String,
    /// Predictor assertions, indexed like [`PREDICTORS`].
    pub predictors: [f64; PREDICTORS.len()],
    /// Recorded outcome; scoring material only, invisible to inference.
    pub cardio: f64,
    /// Set by [`infer`]; 1 = presence, 0 = absence.
    pub inferred_class: Option<u8>,
}

/// Schema plus individuals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ontology {
    pub individuals: Vec<Individual>,
}

/// One individual per record, named by position.
pub fn build_ontology(d: &Dataset) -> Ontology {
    let individuals = d
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| Individual {
            iri_suffix: format!("patient_{i:05}"),
            predictors: std::array::from_fn(|f| r.feature(f)),
            cardio: r.cardio as f64,
            inferred_class: None,
        })
        .collect();
    Ontology { individuals }
}

/// Outcome counts of one inference run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InferenceSummary {
    pub presence: usize,
    pub absence: usize,
    /// Individuals no rule matched (decided by the default class).
    pub fallbacks: usize,
}

impl fmt::Display for InferenceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "inferred presence: {}, absence: {}, fallbacks: {}",
            self.presence, self.absence, self.fallbacks
        )
    }
}

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error(
        "rule atom references property index {0}, outside the predictor \
         properties inference may read"
    )]
    ForbiddenProperty(usize),
}

/// Apply the rules to every individual, assert the concluded class, and
/// report the counts. Rules are validated first: any atom naming a property
/// other than the eleven predictors aborts before anything is inferred.
pub fn infer(o: &mut Ontology, rules: &RuleSet) -> Result<InferenceSummary, OntologyError> {
    for rule in &rules.rules {
        for atom in &rule.atoms {
            if atom.feature >= PREDICTORS.len() {
                return Err(OntologyError::ForbiddenProperty(atom.feature));
            }
        }
    }
    let mut summary = InferenceSummary::default();
    for ind in &mut o.individuals {
        let decision = rules.decide_values(&ind.predictors);
        ind.inferred_class = Some(decision.class);
        if decision.class == 1 {
            summary.presence += 1;
        } else {
            summary.absence += 1;
        }
        summary.fallbacks += usize::from(decision.fell_back);
    }
    Ok(summary)
}

/// Confusion-matrix inputs after inference: (inferred, recorded) per
/// individual. Panics if inference has not run.
pub fn inferred_vs_recorded(o: &Ontology) -> (Vec<u8>, Vec<u8>) {
    let inferred = o
        .individuals
        .iter()
        .map(|i| i.inferred_class.expect("inference has not run"))
        .collect();
    let recorded = o.individuals.iter().map(|i| (i.cardio == 1.0) as u8).collect();
    (inferred, recorded)
}

impl Ontology {
    /// Individuals inferred into the given class; handy for reporting.
    pub fn members_of(&self, class: u8) -> impl Iterator<Item = &Individual> {
        self.individuals
            .iter()
            .filter(move |i| i.inferred_class == Some(class))
    }
}

/// Render a class constant for reports.
pub fn diagnostic_name(class: u8) -> &'static str {
    class_name(class)
}
