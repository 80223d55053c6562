//! Versioned text serialization of trained models.
//!
//! Every file begins `cardio-model v1 <algorithm>`; the body is
//! line-oriented `key=value` fields, one node/weight/point per line, with
//! attribute names spelled out. Floating-point values print in Rust's
//! shortest round-trip form, so save -> load reproduces the model exactly.
//! The tree body is also the input contract for rule extraction from saved
//! models.

use std::fmt::Write as _;

use crate::data::{predictor_index, PREDICTORS};
use crate::learners::tree::{DecisionTree, Node, SplitTest};
use crate::learners::{
    BayesModel, KnnModel, LogisticModel, MlpModel, RandomForest, SvmModel, TrainedModel,
};
use thiserror::Error;

const MAGIC: &str = "cardio-model";
const VERSION: &str = "v1";
const D: usize = PREDICTORS.len();

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unsupported model header `{0}`; expected `cardio-model v1 <algorithm>`")]
    BadHeader(String),
    #[error("unknown algorithm `{0}` in model header")]
    UnknownAlgorithm(String),
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, ModelIoError> {
    Err(ModelIoError::Malformed {
        line,
        message: message.into(),
    })
}

/// Render a model to its text form.
pub fn save(model: &TrainedModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION} {}", model.algorithm().name());
    match model {
        TrainedModel::Tree(t) => write_tree(&mut out, t),
        TrainedModel::Forest(f) => {
            let _ = writeln!(out, "forest trees={}", f.trees.len());
            for t in &f.trees {
                write_tree(&mut out, t);
            }
        }
        TrainedModel::Logistic(m) => {
            let _ = writeln!(
                out,
                "logistic intercept={} iterations={}",
                m.intercept, m.iterations
            );
            for f in 0..D {
                let _ = writeln!(out, "weight {} {}", PREDICTORS[f], m.weights[f]);
            }
        }
        TrainedModel::Bayes(m) => {
            let _ = writeln!(
                out,
                "bayes log_prior0={} log_prior1={}",
                m.log_priors[0], m.log_priors[1]
            );
            for f in 0..D {
                for c in 0..2 {
                    let (mean, var) = m.gaussians[f][c];
                    let _ = writeln!(
                        out,
                        "gaussian {} class={c} mean={mean} var={var}",
                        PREDICTORS[f]
                    );
                }
            }
            for f in 0..D {
                for c in 0..2 {
                    let t = &m.log_tables[f][c];
                    let _ = writeln!(
                        out,
                        "table {} class={c} {} {} {}",
                        PREDICTORS[f], t[0], t[1], t[2]
                    );
                }
            }
        }
        TrainedModel::Knn(m) => {
            let _ = writeln!(out, "knn k={} n={}", m.k, m.points.len());
            let order: Vec<String> = m.scan_order().iter().map(|f| PREDICTORS[*f].to_string()).collect();
            let _ = writeln!(out, "order {}", order.join(" "));
            for (p, l) in m.points.iter().zip(&m.labels) {
                let vals: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "point {} label={l}", vals.join(" "));
            }
        }
        TrainedModel::Svm(m) => {
            let _ = writeln!(out, "svm bias={}", m.bias);
            for f in 0..D {
                let _ = writeln!(
                    out,
                    "weight {} {} mean={} scale={}",
                    PREDICTORS[f], m.weights[f], m.means[f], m.scales[f]
                );
            }
        }
        TrainedModel::Mlp(m) => {
            let _ = writeln!(out, "mlp hidden={} params={}", m.hidden, m.theta.len());
            for f in 0..D {
                let _ = writeln!(
                    out,
                    "scale {} min={} range={}",
                    PREDICTORS[f], m.mins[f], m.ranges[f]
                );
            }
            for chunk in m.theta.chunks(8) {
                let vals: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "theta {}", vals.join(" "));
            }
        }
    }
    out
}

fn write_tree(out: &mut String, t: &DecisionTree) {
    let _ = writeln!(
        out,
        "tree nodes={} train={} majority={}",
        t.nodes.len(),
        t.n_train,
        t.majority_class
    );
    for (i, node) in t.nodes.iter().enumerate() {
        match node {
            Node::Split {
                feature,
                test,
                left,
                right,
            } => {
                let (op, v) = match test {
                    SplitTest::Le(v) => ("le", v),
                    SplitTest::Eq(v) => ("eq", v),
                };
                let _ = writeln!(
                    out,
                    "node {i} split {} {op} {v} left={left} right={right}",
                    PREDICTORS[*feature]
                );
            }
            Node::Leaf { class, counts } => {
                let _ = writeln!(
                    out,
                    "node {i} leaf class={class} n0={} n1={}",
                    counts[0], counts[1]
                );
            }
        }
    }
}

/// Line cursor with 1-based positions for error reporting.
struct Lines<'a> {
    lines: Vec<&'a str>,
    at: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        while self.at < self.lines.len() {
            let line = self.lines[self.at];
            self.at += 1;
            if !line.trim().is_empty() {
                return Some((self.at, line.trim()));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), ModelIoError> {
        self.next()
            .ok_or(ModelIoError::Malformed {
                line: self.at,
                message: format!("unexpected end of file, expected {what}"),
            })
    }
}

fn kv<'a>(token: &'a str, key: &str, line: usize) -> Result<&'a str, ModelIoError> {
    match token.strip_prefix(key).and_then(|r| r.strip_prefix('=')) {
        Some(v) => Ok(v),
        None => fail(line, format!("expected `{key}=...`, got `{token}`")),
    }
}

fn parse_f64(text: &str, line: usize) -> Result<f64, ModelIoError> {
    text.parse::<f64>()
        .map_err(|_| ModelIoError::Malformed {
            line,
            message: format!("expected number, got `{text}`"),
        })
}

fn parse_usize(text: &str, line: usize) -> Result<usize, ModelIoError> {
    text.parse::<usize>()
        .map_err(|_| ModelIoError::Malformed {
            line,
            message: format!("expected non-negative integer, got `{text}`"),
        })
}

fn parse_feature(text: &str, line: usize) -> Result<usize, ModelIoError> {
    predictor_index(text).ok_or(ModelIoError::Malformed {
        line,
        message: format!("unknown attribute `{text}`"),
    })
}

fn read_tree(lines: &mut Lines) -> Result<DecisionTree, ModelIoError> {
    let (ln, header) = lines.expect("tree header")?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 4 || tokens[0] != "tree" {
        return fail(ln, format!("expected `tree nodes=... train=... majority=...`, got `{header}`"));
    }
    let n_nodes = parse_usize(kv(tokens[1], "nodes", ln)?, ln)?;
    let n_train = parse_usize(kv(tokens[2], "train", ln)?, ln)?;
    let majority = parse_usize(kv(tokens[3], "majority", ln)?, ln)? as u8;
    let mut nodes = Vec::with_capacity(n_nodes);
    for want in 0..n_nodes {
        let (ln, line) = lines.expect("node line")?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() < 3 || t[0] != "node" {
            return fail(ln, format!("expected `node ...`, got `{line}`"));
        }
        if parse_usize(t[1], ln)? != want {
            return fail(ln, format!("node lines out of order: expected {want}"));
        }
        match t[2] {
            "split" if t.len() == 8 => {
                let feature = parse_feature(t[3], ln)?;
                let value = parse_f64(t[5], ln)?;
                let test = match t[4] {
                    "le" => SplitTest::Le(value),
                    "eq" => SplitTest::Eq(value),
                    other => return fail(ln, format!("unknown split operator `{other}`")),
                };
                let left = parse_usize(kv(t[6], "left", ln)?, ln)?;
                let right = parse_usize(kv(t[7], "right", ln)?, ln)?;
                if left >= n_nodes || right >= n_nodes {
                    return fail(ln, "child index out of range");
                }
                nodes.push(Node::Split {
                    feature,
                    test,
                    left,
                    right,
                });
            }
            "leaf" if t.len() == 6 => {
                let class = parse_usize(kv(t[3], "class", ln)?, ln)? as u8;
                let n0 = parse_usize(kv(t[4], "n0", ln)?, ln)? as u64;
                let n1 = parse_usize(kv(t[5], "n1", ln)?, ln)? as u64;
                if class > 1 {
                    return fail(ln, "leaf class must be 0 or 1");
                }
                nodes.push(Node::Leaf {
                    class,
                    counts: [n0, n1],
                });
            }
            other => return fail(ln, format!("unknown node kind `{other}`")),
        }
    }
    Ok(DecisionTree {
        nodes,
        n_train,
        majority_class: majority,
    })
}

/// Parse a model file produced by [`save`].
pub fn load(text: &str) -> Result<TrainedModel, ModelIoError> {
    let mut lines = Lines {
        lines: text.lines().collect(),
        at: 0,
    };
    let (_, header) = lines.expect("model header")?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 3 || tokens[0] != MAGIC || tokens[1] != VERSION {
        return Err(ModelIoError::BadHeader(header.to_string()));
    }
    match tokens[2] {
        "dt" => Ok(TrainedModel::Tree(read_tree(&mut lines)?)),
        "rf" => {
            let (ln, line) = lines.expect("forest header")?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 2 || t[0] != "forest" {
                return fail(ln, format!("expected `forest trees=...`, got `{line}`"));
            }
            let n = parse_usize(kv(t[1], "trees", ln)?, ln)?;
            let mut trees = Vec::with_capacity(n);
            for _ in 0..n {
                trees.push(read_tree(&mut lines)?);
            }
            Ok(TrainedModel::Forest(RandomForest { trees }))
        }
        "lr" => {
            let (ln, line) = lines.expect("logistic header")?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 || t[0] != "logistic" {
                return fail(ln, format!("expected `logistic intercept=... iterations=...`, got `{line}`"));
            }
            let intercept = parse_f64(kv(t[1], "intercept", ln)?, ln)?;
            let iterations = parse_usize(kv(t[2], "iterations", ln)?, ln)?;
            let mut weights = [0.0; D];
            let mut seen = [false; D];
            for _ in 0..D {
                let (ln, line) = lines.expect("weight line")?;
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 3 || t[0] != "weight" {
                    return fail(ln, format!("expected `weight <attr> <value>`, got `{line}`"));
                }
                let f = parse_feature(t[1], ln)?;
                weights[f] = parse_f64(t[2], ln)?;
                seen[f] = true;
            }
            if let Some(f) = seen.iter().position(|s| !s) {
                return fail(lines.at, format!("missing weight for `{}`", PREDICTORS[f]));
            }
            Ok(TrainedModel::Logistic(LogisticModel {
                weights,
                intercept,
                iterations,
            }))
        }
        "nb" => {
            let (ln, line) = lines.expect("bayes header")?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 || t[0] != "bayes" {
                return fail(ln, format!("expected `bayes log_prior0=... log_prior1=...`, got `{line}`"));
            }
            let log_priors = [
                parse_f64(kv(t[1], "log_prior0", ln)?, ln)?,
                parse_f64(kv(t[2], "log_prior1", ln)?, ln)?,
            ];
            let mut gaussians = [[(0.0, 0.0); 2]; D];
            for _ in 0..(D * 2) {
                let (ln, line) = lines.expect("gaussian line")?;
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 5 || t[0] != "gaussian" {
                    return fail(ln, format!("expected `gaussian <attr> class=... mean=... var=...`, got `{line}`"));
                }
                let f = parse_feature(t[1], ln)?;
                let c = parse_usize(kv(t[2], "class", ln)?, ln)?;
                if c > 1 {
                    return fail(ln, "class must be 0 or 1");
                }
                gaussians[f][c] = (
                    parse_f64(kv(t[3], "mean", ln)?, ln)?,
                    parse_f64(kv(t[4], "var", ln)?, ln)?,
                );
            }
            let mut log_tables = [[[0.0; 3]; 2]; D];
            for _ in 0..(D * 2) {
                let (ln, line) = lines.expect("table line")?;
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 6 || t[0] != "table" {
                    return fail(ln, format!("expected `table <attr> class=... <3 values>`, got `{line}`"));
                }
                let f = parse_feature(t[1], ln)?;
                let c = parse_usize(kv(t[2], "class", ln)?, ln)?;
                if c > 1 {
                    return fail(ln, "class must be 0 or 1");
                }
                for v in 0..3 {
                    log_tables[f][c][v] = parse_f64(t[3 + v], ln)?;
                }
            }
            Ok(TrainedModel::Bayes(BayesModel {
                log_priors,
                gaussians,
                log_tables,
            }))
        }
        "knn" => {
            let (ln, line) = lines.expect("knn header")?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 || t[0] != "knn" {
                return fail(ln, format!("expected `knn k=... n=...`, got `{line}`"));
            }
            let k = parse_usize(kv(t[1], "k", ln)?, ln)?;
            let n = parse_usize(kv(t[2], "n", ln)?, ln)?;
            let (ln, line) = lines.expect("order line")?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != D + 1 || t[0] != "order" {
                return fail(ln, format!("expected `order <{D} attributes>`, got `{line}`"));
            }
            let mut scan_order = [0usize; D];
            for (i, name) in t[1..].iter().enumerate() {
                scan_order[i] = parse_feature(name, ln)?;
            }
            let mut points = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for _ in 0..n {
                let (ln, line) = lines.expect("point line")?;
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != D + 2 || t[0] != "point" {
                    return fail(ln, format!("expected `point <{D} values> label=...`, got `{line}`"));
                }
                let mut p = [0.0; D];
                for (i, v) in t[1..=D].iter().enumerate() {
                    p[i] = parse_f64(v, ln)?;
                }
                let label = parse_usize(kv(t[D + 1], "label", ln)?, ln)? as u8;
                if label > 1 {
                    return fail(ln, "label must be 0 or 1");
                }
                points.push(p);
                labels.push(label);
            }
            Ok(TrainedModel::Knn(KnnModel::from_parts(
                points, labels, k, scan_order,
            )))
        }
        "svm" => {
            let (ln, line) = lines.expect("svm header")?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 2 || t[0] != "svm" {
                return fail(ln, format!("expected `svm bias=...`, got `{line}`"));
            }
            let bias = parse_f64(kv(t[1], "bias", ln)?, ln)?;
            let mut weights = [0.0; D];
            let mut means = [0.0; D];
            let mut scales = [1.0; D];
            for _ in 0..D {
                let (ln, line) = lines.expect("weight line")?;
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 5 || t[0] != "weight" {
                    return fail(ln, format!("expected `weight <attr> <value> mean=... scale=...`, got `{line}`"));
                }
                let f = parse_feature(t[1], ln)?;
                weights[f] = parse_f64(t[2], ln)?;
                means[f] = parse_f64(kv(t[3], "mean", ln)?, ln)?;
                scales[f] = parse_f64(kv(t[4], "scale", ln)?, ln)?;
            }
            Ok(TrainedModel::Svm(SvmModel {
                weights,
                bias,
                means,
                scales,
            }))
        }
        "ann" => {
            let (ln, line) = lines.expect("mlp header")?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 || t[0] != "mlp" {
                return fail(ln, format!("expected `mlp hidden=... params=...`, got `{line}`"));
            }
            let hidden = parse_usize(kv(t[1], "hidden", ln)?, ln)?;
            let n_params = parse_usize(kv(t[2], "params", ln)?, ln)?;
            let mut mins = [0.0; D];
            let mut ranges = [1.0; D];
            for _ in 0..D {
                let (ln, line) = lines.expect("scale line")?;
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 4 || t[0] != "scale" {
                    return fail(ln, format!("expected `scale <attr> min=... range=...`, got `{line}`"));
                }
                let f = parse_feature(t[1], ln)?;
                mins[f] = parse_f64(kv(t[2], "min", ln)?, ln)?;
                ranges[f] = parse_f64(kv(t[3], "range", ln)?, ln)?;
            }
            let mut theta = Vec::with_capacity(n_params);
            while theta.len() < n_params {
                let (ln, line) = lines.expect("theta line")?;
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.is_empty() || t[0] != "theta" {
                    return fail(ln, format!("expected `theta <values>`, got `{line}`"));
                }
                for v in &t[1..] {
                    theta.push(parse_f64(v, ln)?);
                }
            }
            if theta.len() != n_params {
                return fail(lines.at, format!("expected {n_params} parameters, got {}", theta.len()));
            }
            Ok(TrainedModel::Mlp(MlpModel {
                hidden,
                theta,
                mins,
                ranges,
            }))
        }
        other => Err(ModelIoError::UnknownAlgorithm(other.to_string())),
    }
}
