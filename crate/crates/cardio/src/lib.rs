//! Cardiovascular-disease classification toolkit.
//!
//! The pipeline: load and deduplicate the patient table ([`data`]), train any
//! of seven classifiers ([`learners`]), extract decision-tree branches as
//! rules ([`rules`]), materialize rules and patients in an ontology that a
//! forward-chaining reasoner completes ([`ontology`]), and score everything
//! with confusion-matrix metrics under percentage-split and cross-validation
//! protocols ([`eval`], [`metrics`]). [`synth`] generates a statistically
//! comparable stand-in corpus when the original file is unavailable.

pub mod data;
pub mod eval;
pub mod learners;
pub mod metrics;
pub mod ontology;
pub mod rules;
pub mod synth;
