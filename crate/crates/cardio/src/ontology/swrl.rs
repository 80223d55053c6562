//! SWRL-subset text form of rule sets.
//!
//! Emission is canonical and byte-stable: one rule per line,
//!
//! ```text
//! Patient(?pt) ^ ap_hi(?pt, ?V1) ^ swrlb:greaterThan(?V1, '130'^^xsd:decimal) -> presence(?pt)
//! ```
//!
//! with a fresh variable per atom and literals always typed `^^xsd:decimal`.
//! Comment lines carry the fallback class and source fingerprint so a parsed
//! document reproduces the original rule set exactly. The parser is more
//! lenient than the emitter: any variable names, `→` as well as `->`, bare
//! consequents without an argument, and property/builtin atoms paired by
//! variable rather than by adjacency.

use std::fmt::Write as _;

use crate::data::{predictor_index, PREDICTORS};
use crate::rules::{class_name, Comparator, RuleAtom, RuleSet, SwrlRule};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SwrlParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Render a rule set as a SWRL document.
pub fn serialize_swrl(rules: &RuleSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# SWRL rules over Patient data properties");
    let _ = writeln!(out, "# properties: {}", PREDICTORS.join(" "));
    let _ = writeln!(out, "# default: {}", class_name(rules.default_class));
    if !rules.source.is_empty() {
        let _ = writeln!(out, "# source: {}", rules.source);
    }
    for rule in &rules.rules {
        out.push_str("Patient(?pt)");
        for (i, atom) in rule.atoms.iter().enumerate() {
            let builtin = match atom.comparator {
                Comparator::Eq => "equal",
                Comparator::Le => "lessThanOrEqual",
                Comparator::Gt => "greaterThan",
            };
            let _ = write!(
                out,
                " ^ {prop}(?pt, ?V{v}) ^ swrlb:{builtin}(?V{v}, '{lit}'^^xsd:decimal)",
                prop = PREDICTORS[atom.feature],
                v = i + 1,
                lit = atom.value,
            );
        }
        let _ = writeln!(out, " -> {}(?pt)", class_name(rule.consequent));
    }
    out
}

/// One predicate application: `name(arg1)` or `name(arg1, arg2)`.
struct Call {
    name: String,
    args: Vec<Arg>,
    column: usize,
}

enum Arg {
    Variable(String),
    /// Quoted value plus its type suffix, e.g. `'130'^^xsd:decimal`.
    Literal(String, String),
}

/// Character scanner over one line.
struct Scan {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Scan {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, SwrlParseError> {
        Err(SwrlParseError {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, expected: char) -> Result<(), SwrlParseError> {
        match self.peek() {
            Some(c) if c == expected => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.err(format!("expected `{expected}`, found `{c}`")),
            None => self.err(format!("expected `{expected}`, found end of line")),
        }
    }

    /// `[A-Za-z_][A-Za-z0-9_:]*` — covers `swrlb:greaterThan`.
    fn ident(&mut self) -> Result<String, SwrlParseError> {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == ':')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a name");
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn arrow(&mut self) -> bool {
        if self.peek() == Some('→') {
            self.pos += 1;
            return true;
        }
        if self.chars.get(self.pos) == Some(&'-') && self.chars.get(self.pos + 1) == Some(&'>') {
            self.pos += 2;
            return true;
        }
        false
    }

    fn call(&mut self) -> Result<Call, SwrlParseError> {
        let column = self.pos + 1;
        let name = self.ident()?;
        let mut args = Vec::new();
        self.skip_ws();
        if self.peek() == Some('(') {
            self.eat('(')?;
            loop {
                self.skip_ws();
                match self.peek() {
                    Some('?') => {
                        self.eat('?')?;
                        args.push(Arg::Variable(self.ident()?));
                    }
                    Some('\'') => {
                        self.eat('\'')?;
                        let start = self.pos;
                        while self.peek().is_some_and(|c| c != '\'') {
                            self.pos += 1;
                        }
                        let value: String = self.chars[start..self.pos].iter().collect();
                        self.eat('\'')?;
                        self.eat('^')?;
                        self.eat('^')?;
                        let suffix = self.ident()?;
                        args.push(Arg::Literal(value, suffix));
                    }
                    Some(')') => break,
                    Some(c) => return self.err(format!("unexpected `{c}` in argument list")),
                    None => return self.err("unterminated argument list"),
                }
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.eat(',')?;
                } else {
                    break;
                }
            }
            self.skip_ws();
            self.eat(')')?;
        }
        Ok(Call { name, args, column })
    }
}

fn comparator_for(builtin: &str) -> Option<Comparator> {
    match builtin {
        "swrlb:equal" => Some(Comparator::Eq),
        "swrlb:lessThanOrEqual" => Some(Comparator::Le),
        "swrlb:greaterThan" => Some(Comparator::Gt),
        _ => None,
    }
}

fn consequent_class(name: &str) -> Option<u8> {
    match name {
        "presence" => Some(1),
        "absence" => Some(0),
        _ => None,
    }
}

fn parse_rule_line(line: &str, line_no: usize) -> Result<SwrlRule, SwrlParseError> {
    let mut scan = Scan {
        chars: line.chars().collect(),
        pos: 0,
        line: line_no,
    };
    scan.skip_ws();

    // body: Patient(?x) plus property and builtin applications
    let mut patient_var: Option<String> = None;
    // (variable, feature, column) in appearance order
    let mut bindings: Vec<(String, usize)> = Vec::new();
    // builtin constraint per variable
    let mut constraints: Vec<(String, Comparator, f64)> = Vec::new();
    loop {
        scan.skip_ws();
        if scan.arrow() {
            break;
        }
        let call = scan.call()?;
        let at = |message: String| SwrlParseError {
            line: line_no,
            column: call.column,
            message,
        };
        if call.name == "Patient" {
            match call.args.as_slice() {
                [Arg::Variable(v)] => {
                    if patient_var.replace(v.clone()).is_some() {
                        return Err(at("duplicate Patient atom".into()));
                    }
                }
                _ => return Err(at("Patient takes exactly one variable".into())),
            }
        } else if let Some(comparator) = comparator_for(&call.name) {
            match call.args.as_slice() {
                [Arg::Variable(v), Arg::Literal(lit, suffix)] => {
                    if suffix != "xsd:decimal" {
                        return Err(at(format!("literal must be typed xsd:decimal, found `{suffix}`")));
                    }
                    let value: f64 = lit.parse().map_err(|_| {
                        at(format!("`{lit}` is not a decimal literal"))
                    })?;
                    if constraints.iter().any(|(var, ..)| var == v) {
                        return Err(at(format!("variable ?{v} is constrained twice")));
                    }
                    constraints.push((v.clone(), comparator, value));
                }
                _ => return Err(at(format!("{} takes a variable and a literal", call.name))),
            }
        } else if call.name.starts_with("swrlb:") {
            return Err(at(format!("unsupported builtin `{}`", call.name)));
        } else if call.name == "cardio" {
            return Err(at("property `cardio` cannot appear in a rule body".into()));
        } else if let Some(feature) = predictor_index(&call.name) {
            match call.args.as_slice() {
                [Arg::Variable(subject), Arg::Variable(object)] => {
                    if patient_var.as_deref() != Some(subject.as_str()) {
                        return Err(at(format!(
                            "property subject ?{subject} is not the Patient variable"
                        )));
                    }
                    if bindings.iter().any(|(var, _)| var == object) {
                        return Err(at(format!("variable ?{object} is bound twice")));
                    }
                    bindings.push((object.clone(), feature));
                }
                _ => return Err(at(format!("{} takes two variables", call.name))),
            }
        } else {
            return Err(at(format!("unknown property `{}`", call.name)));
        }
        scan.skip_ws();
        if scan.arrow() {
            break;
        }
        if scan.peek() == Some('^') {
            scan.eat('^')?;
        } else if scan.peek().is_none() {
            return scan.err("rule has no consequent");
        } else {
            return scan.err(format!("expected `^` or an arrow, found `{}`", scan.peek().unwrap()));
        }
    }
    if patient_var.is_none() {
        return scan.err("rule body must contain a Patient atom");
    }

    // consequent: presence/absence, argument optional
    scan.skip_ws();
    let call = scan.call()?;
    let consequent = consequent_class(&call.name).ok_or_else(|| SwrlParseError {
        line: line_no,
        column: call.column,
        message: format!("consequent must be presence or absence, found `{}`", call.name),
    })?;
    scan.skip_ws();
    if scan.peek().is_some() {
        return scan.err("trailing text after consequent");
    }

    // pair property atoms with their builtins, in property order
    let mut atoms = Vec::with_capacity(bindings.len());
    for (var, feature) in &bindings {
        let (_, comparator, value) = constraints
            .iter()
            .find(|(cv, ..)| cv == var)
            .ok_or_else(|| SwrlParseError {
                line: line_no,
                column: 1,
                message: format!("no builtin constrains ?{var}"),
            })?;
        atoms.push(RuleAtom {
            feature: *feature,
            comparator: *comparator,
            value: *value,
        });
    }
    if constraints.len() > bindings.len() {
        let loose = constraints
            .iter()
            .find(|(v, ..)| !bindings.iter().any(|(bv, _)| bv == v))
            .unwrap();
        return Err(SwrlParseError {
            line: line_no,
            column: 1,
            message: format!("builtin constrains ?{}, which no property binds", loose.0),
        });
    }
    Ok(SwrlRule { atoms, consequent })
}

/// Parse a SWRL document back into a rule set.
pub fn parse_swrl(text: &str) -> Result<RuleSet, SwrlParseError> {
    let mut rules = Vec::new();
    let mut default_class = 0u8;
    let mut source = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("default:") {
                default_class = match v.trim() {
                    "presence" => 1,
                    "absence" => 0,
                    other => {
                        return Err(SwrlParseError {
                            line: line_no,
                            column: 1,
                            message: format!("default class must be presence or absence, found `{other}`"),
                        })
                    }
                };
            } else if let Some(v) = comment.strip_prefix("source:") {
                source = v.trim().to_string();
            }
            continue;
        }
        rules.push(parse_rule_line(raw, line_no)?);
    }
    Ok(RuleSet {
        rules,
        default_class,
        source,
    })
}
