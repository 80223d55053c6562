//! Turtle rendering of the ontology, plus a reader for the same subset.
//!
//! The export is canonical: fixed prefix block, schema triples, then
//! individuals sorted by local name, every value as a typed
//! `"..."^^xsd:decimal` literal. Two exports of the same ontology are
//! byte-identical, which makes the format suitable for golden files. The
//! importer understands exactly this subset — enough to reload an exported
//! document — and checks that every individual asserts each attribute
//! exactly once.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::data::{predictor_index, PREDICTORS};
use crate::ontology::{property_names, Individual, Ontology};
use crate::rules::class_name;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct TurtleError {
    pub line: usize,
    pub message: String,
}

const PREFIXES: &str = "\
@prefix : <http://example.org/cardio#> .
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
";

/// Render the ontology as Turtle.
pub fn export_turtle(o: &Ontology) -> String {
    let mut out = String::from(PREFIXES);
    out.push('\n');
    out.push_str(":Diagnostic a owl:Class .\n");
    out.push_str(":Patient a owl:Class .\n");
    out.push_str(":absence a owl:Class ;\n    rdfs:subClassOf :Diagnostic .\n");
    out.push_str(":presence a owl:Class ;\n    rdfs:subClassOf :Diagnostic .\n");
    out.push('\n');
    for prop in property_names() {
        let _ = writeln!(out, ":{prop} a owl:DatatypeProperty ;");
        let _ = writeln!(out, "    rdfs:domain :Patient ;");
        let _ = writeln!(out, "    rdfs:range xsd:decimal .");
    }
    let mut order: Vec<&Individual> = o.individuals.iter().collect();
    order.sort_by_key(|i| (i.iri_suffix.len(), i.iri_suffix.clone()));
    for ind in order {
        out.push('\n');
        match ind.inferred_class {
            None => {
                let _ = writeln!(out, ":{} a :Patient ;", ind.iri_suffix);
            }
            Some(c) => {
                let _ = writeln!(out, ":{} a :Patient , :{} ;", ind.iri_suffix, class_name(c));
            }
        }
        for (f, name) in PREDICTORS.iter().enumerate() {
            let _ = writeln!(out, "    :{name} \"{}\"^^xsd:decimal ;", ind.predictors[f]);
        }
        let _ = writeln!(out, "    :cardio \"{}\"^^xsd:decimal .", ind.cardio);
    }
    out
}

fn literal_value(token: &str, line: usize) -> Result<f64, TurtleError> {
    let fail = |message: String| TurtleError { line, message };
    let body = token
        .strip_prefix('"')
        .and_then(|t| t.strip_suffix("^^xsd:decimal"))
        .and_then(|t| t.strip_suffix('"'))
        .ok_or_else(|| fail(format!("expected a \"...\"^^xsd:decimal literal, found `{token}`")))?;
    body.parse()
        .map_err(|_| fail(format!("`{body}` is not a decimal value")))
}

/// Read an exported document back. Statements that do not describe a
/// `:Patient` individual (prefixes, schema) are checked for shape only.
pub fn import_turtle(text: &str) -> Result<Ontology, TurtleError> {
    let mut individuals = Vec::new();
    let mut statement: Vec<&str> = Vec::new();
    let mut start_line = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('@') || line.starts_with('#') {
            continue;
        }
        if statement.is_empty() {
            start_line = line_no;
        }
        statement.push(line);
        if !line.ends_with('.') {
            continue;
        }
        let joined = statement.join(" ");
        statement.clear();
        if let Some(ind) = parse_statement(&joined, start_line)? {
            individuals.push(ind);
        }
    }
    if !statement.is_empty() {
        return Err(TurtleError {
            line: start_line,
            message: "unterminated statement (missing `.`)".to_string(),
        });
    }
    Ok(Ontology { individuals })
}

fn parse_statement(joined: &str, line: usize) -> Result<Option<Individual>, TurtleError> {
    let fail = |message: String| TurtleError { line, message };
    let mut tokens: Vec<&str> = joined.split_whitespace().collect();
    match tokens.pop() {
        Some(".") => {}
        _ => {
            // final token carries the dot, e.g. `owl:Class .` collapsed
            return Err(fail("statement must end with ` .`".to_string()));
        }
    }
    if tokens.is_empty() {
        return Err(fail("empty statement".to_string()));
    }
    let subject = tokens[0];
    // predicate-object groups, `;`-separated
    let mut groups: Vec<Vec<&str>> = vec![Vec::new()];
    for t in &tokens[1..] {
        if *t == ";" {
            groups.push(Vec::new());
        } else {
            groups.last_mut().unwrap().push(t);
        }
    }
    groups.retain(|g| !g.is_empty());

    let mut types: Vec<&str> = Vec::new();
    let mut values: HashMap<&str, f64> = HashMap::new();
    for group in &groups {
        let (pred, objects) = group.split_first().unwrap();
        if *pred == "a" || *pred == "rdf:type" {
            for obj in objects {
                if *obj != "," {
                    types.push(obj);
                }
            }
        } else if let Some(prop) = pred.strip_prefix(':') {
            if objects.len() != 1 {
                return Err(fail(format!("property `{pred}` must have exactly one value")));
            }
            if !types.contains(&":Patient") {
                // schema predicates like rdfs:domain carry IRIs, skip below
                continue;
            }
            if values
                .insert(prop, literal_value(objects[0], line)?)
                .is_some()
            {
                return Err(fail(format!("property `{pred}` asserted twice")));
            }
        }
        // rdfs:domain / rdfs:range / rdfs:subClassOf: schema shape, ignored
    }
    if !types.contains(&":Patient") {
        return Ok(None);
    }
    let suffix = subject
        .strip_prefix(':')
        .ok_or_else(|| fail(format!("individual subject `{subject}` is not in the default namespace")))?;
    let inferred_class = if types.contains(&":presence") {
        Some(1)
    } else if types.contains(&":absence") {
        Some(0)
    } else {
        None
    };
    let mut predictors = [0.0; PREDICTORS.len()];
    for (f, name) in PREDICTORS.iter().enumerate() {
        predictors[f] = *values
            .get(name)
            .ok_or_else(|| fail(format!("individual `{subject}` is missing :{name}")))?;
    }
    let cardio = *values
        .get("cardio")
        .ok_or_else(|| fail(format!("individual `{subject}` is missing :cardio")))?;
    if values.len() != PREDICTORS.len() + 1 {
        let extra = values
            .keys()
            .find(|k| predictor_index(k).is_none() && **k != "cardio")
            .unwrap();
        return Err(fail(format!("unknown property :{extra} on `{subject}`")));
    }
    Ok(Some(Individual {
        iri_suffix: suffix.to_string(),
        predictors,
        cardio,
        inferred_class,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Dataset, PatientRecord};
    use crate::ontology::{build_ontology, infer};
    use crate::rules::{Comparator, RuleAtom, RuleSet, SwrlRule};

    fn two_record_fixture() -> Dataset {
        Dataset::from_records(vec![
            PatientRecord {
                age: 18393,
                gender: 2,
                height: 168,
                weight: 62.0,
                ap_hi: 110,
                ap_lo: 80,
                cholesterol: 1,
                gluc: 1,
                smoke: 0,
                alco: 0,
                active: 1,
                cardio: 0,
            },
            PatientRecord {
                age: 20228,
                gender: 1,
                height: 156,
                weight: 85.0,
                ap_hi: 140,
                ap_lo: 90,
                cholesterol: 3,
                gluc: 1,
                smoke: 0,
                alco: 0,
                active: 1,
                cardio: 1,
            },
        ])
    }

    #[test]
    fn empty_ontology_exports_schema_only_and_is_stable() {
        let o = Ontology::default();
        let first = export_turtle(&o);
        let second = export_turtle(&o);
        assert_eq!(first, second);
        assert!(first.starts_with("@prefix : <http://example.org/cardio#> .\n"));
        for prop in property_names() {
            assert!(first.contains(&format!(":{prop} a owl:DatatypeProperty ;")));
        }
        assert!(first.contains(":presence a owl:Class ;\n    rdfs:subClassOf :Diagnostic ."));
        assert!(!first.contains(":patient_"));
    }

    #[test]
    fn two_individual_export_matches_the_golden_document() {
        let o = build_ontology(&two_record_fixture());
        let text = export_turtle(&o);
        let golden = "\
@prefix : <http://example.org/cardio#> .
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .

:Diagnostic a owl:Class .
:Patient a owl:Class .
:absence a owl:Class ;
    rdfs:subClassOf :Diagnostic .
:presence a owl:Class ;
    rdfs:subClassOf :Diagnostic .

:age a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:gender a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:height a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:weight a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:ap_hi a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:ap_lo a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:cholesterol a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:gluc a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:smoke a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:alco a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:active a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .
:cardio a owl:DatatypeProperty ;
    rdfs:domain :Patient ;
    rdfs:range xsd:decimal .

:patient_00000 a :Patient ;
    :age \"18393\"^^xsd:decimal ;
    :gender \"2\"^^xsd:decimal ;
    :height \"168\"^^xsd:decimal ;
    :weight \"62\"^^xsd:decimal ;
    :ap_hi \"110\"^^xsd:decimal ;
    :ap_lo \"80\"^^xsd:decimal ;
    :cholesterol \"1\"^^xsd:decimal ;
    :gluc \"1\"^^xsd:decimal ;
    :smoke \"0\"^^xsd:decimal ;
    :alco \"0\"^^xsd:decimal ;
    :active \"1\"^^xsd:decimal ;
    :cardio \"0\"^^xsd:decimal .

:patient_00001 a :Patient ;
    :age \"20228\"^^xsd:decimal ;
    :gender \"1\"^^xsd:decimal ;
    :height \"156\"^^xsd:decimal ;
    :weight \"85\"^^xsd:decimal ;
    :ap_hi \"140\"^^xsd:decimal ;
    :ap_lo \"90\"^^xsd:decimal ;
    :cholesterol \"3\"^^xsd:decimal ;
    :gluc \"1\"^^xsd:decimal ;
    :smoke \"0\"^^xsd:decimal ;
    :alco \"0\"^^xsd:decimal ;
    :active \"1\"^^xsd:decimal ;
    :cardio \"1\"^^xsd:decimal .
";
        assert_eq!(text, golden);
    }

    #[test]
    fn export_import_round_trips_assertions_and_inferences() {
        let mut o = build_ontology(&two_record_fixture());
        let rules = RuleSet {
            rules: vec![SwrlRule {
                atoms: vec![RuleAtom {
                    feature: predictor_index("ap_hi").unwrap(),
                    comparator: Comparator::Gt,
                    value: 130.0,
                }],
                consequent: 1,
            }],
            default_class: 0,
            source: String::new(),
        };
        infer(&mut o, &rules).unwrap();
        let text = export_turtle(&o);
        let back = import_turtle(&text).unwrap();
        assert_eq!(back, o);
        assert_eq!(back.individuals[0].inferred_class, Some(0));
        assert_eq!(back.individuals[1].inferred_class, Some(1));
    }

    #[test]
    fn export_sorts_individuals_for_determinism() {
        let mut o = build_ontology(&two_record_fixture());
        o.individuals.reverse();
        let sorted = build_ontology(&two_record_fixture());
        assert_eq!(export_turtle(&o), export_turtle(&sorted));
    }

    #[test]
    fn missing_attribute_is_reported_with_its_line() {
        let mut o = build_ontology(&two_record_fixture());
        o.individuals.truncate(1);
        let text = export_turtle(&o);
        let broken = text.replace("    :gluc \"1\"^^xsd:decimal ;\n", "");
        let err = import_turtle(&broken).unwrap_err();
        assert!(err.to_string().contains(":gluc"), "{err}");
        assert!(err.line > 1);
    }

    #[test]
    fn fractional_weights_survive_the_round_trip() {
        let mut d = two_record_fixture();
        d.records[0].weight = 62.5;
        let o = build_ontology(&d);
        let text = export_turtle(&o);
        assert!(text.contains(":weight \"62.5\"^^xsd:decimal ;"));
        assert_eq!(import_turtle(&text).unwrap(), o);
    }
}
