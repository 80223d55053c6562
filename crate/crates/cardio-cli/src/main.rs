//! `cardio` — batch front end for the cardiovascular classification toolkit.
//!
//! Four subcommands cover the pipeline end to end:
//!
//! * `prepare`  — load (or synthesize) the patient table, deduplicate it, and
//!   write the working dataset plus a summary;
//! * `run`      — train and score classifiers under the chosen evaluation
//!   protocols, writing one report per (classifier, protocol) pair and a
//!   comparison table in Markdown and CSV;
//! * `ontology` — train the decision tree, export its branches as SWRL rules,
//!   run rule inference over the test individuals, and write the Turtle
//!   ontology plus inference counts and a scored report;
//! * `figures`  — render a comparison CSV as four grouped bar charts (SVG).
//!
//! Every output embeds its run configuration (seed, hyperparameters, input
//! fingerprint) as a comment block, so any number in any file can be traced
//! back to the invocation that produced it. File contents are built in memory
//! first and written only after every computation has succeeded, so a failed
//! run leaves no partial tables. Exit status is 0 on success and 1 on any
//! runtime failure, with a single-line diagnostic on stderr; command-line
//! usage errors exit with status 2.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use cardio::data::{
    deduplicate, load_csv, percentage_split, stratified_folds, write_csv, Dataset, SplitSpec,
};
use cardio::eval::{compare, evaluate_cv, evaluate_split, ClassifierId, EvaluationReport, Protocol};
use cardio::learners::{derive_seed, train, AlgorithmId, HyperParams, TrainedModel};
use cardio::metrics::{ConfusionMatrix, MetricSet};
use cardio::ontology::swrl::serialize_swrl;
use cardio::ontology::turtle::export_turtle;
use cardio::ontology::{build_ontology, infer, inferred_vs_recorded, InferenceSummary};
use cardio::rules::{extract_rules, RuleSet};
use cardio::synth::{generate, SynthConfig};

#[derive(Parser)]
#[command(
    name = "cardio",
    version,
    about = "Cardiovascular-disease classification benchmark: prepare data, run classifiers, \
             export the rule ontology, and draw comparison charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load (or synthesize), deduplicate, and write the working dataset
    Prepare(PrepareArgs),
    /// Train and score classifiers under the chosen protocols
    Run(RunArgs),
    /// Export tree rules as SWRL, run inference, write Turtle and counts
    Ontology(OntologyArgs),
    /// Render a comparison CSV as grouped bar charts
    Figures(FiguresArgs),
}

#[derive(Args)]
struct PrepareArgs {
    /// Delimited patient table; omitted: synthesize the stand-in corpus
    #[arg(long)]
    input: Option<PathBuf>,
    /// Field delimiter of the input (and of the written dataset)
    #[arg(long, default_value = ";")]
    delimiter: String,
    /// Seed for the synthetic corpus (no effect when --input is given)
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Prepared dataset (default: <out>/dataset.csv); deduplicated on load
    #[arg(long)]
    input: Option<PathBuf>,
    /// Field delimiter of the input
    #[arg(long, default_value = ";")]
    delimiter: String,
    /// Comma-separated classifiers (knn,nb,ann,svm,rf,lr,dt,ontology) or `all`
    #[arg(long, default_value = "all")]
    algorithms: String,
    /// Comma-separated protocols: folds<k> and/or split<percent>
    #[arg(long, default_value = "folds10,split60")]
    protocols: String,
    /// Seed for splits, folds, and every seeded learner
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Minimum records per decision-tree leaf
    #[arg(long)]
    min_leaf: Option<usize>,
    /// Depth cap for the decision tree (unlimited when omitted)
    #[arg(long)]
    max_depth: Option<usize>,
    /// Neighbor count for knn
    #[arg(long)]
    k: Option<usize>,
    /// Tree count for the random forest
    #[arg(long)]
    trees: Option<usize>,
}

#[derive(Args)]
struct OntologyArgs {
    /// Prepared dataset (default: <out>/dataset.csv); deduplicated on load
    #[arg(long)]
    input: Option<PathBuf>,
    /// Field delimiter of the input
    #[arg(long, default_value = ";")]
    delimiter: String,
    /// Evaluation protocol: folds<k> or split<percent>
    #[arg(long, default_value = "folds10")]
    protocol: String,
    /// Seed for splits, folds, and tree training
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Minimum records per decision-tree leaf
    #[arg(long)]
    min_leaf: Option<usize>,
    /// Depth cap for the decision tree (unlimited when omitted)
    #[arg(long)]
    max_depth: Option<usize>,
}

#[derive(Args)]
struct FiguresArgs {
    /// Comparison table (default: <out>/comparison.csv)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prepare(a) => cmd_prepare(a),
        Command::Run(a) => cmd_run(a),
        Command::Ontology(a) => cmd_ontology(a),
        Command::Figures(a) => cmd_figures(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// prepare
// ---------------------------------------------------------------------------

fn cmd_prepare(a: PrepareArgs) -> Result<()> {
    let delimiter = parse_delimiter(&a.delimiter)?;
    let (raw, input_desc, fingerprint) = match &a.input {
        Some(path) => {
            let d = load_csv(path, delimiter)?;
            let fp = sha256_hex(path)?;
            (d, file_name(path), Some(fp))
        }
        None => {
            let d = generate(&SynthConfig {
                seed: a.seed,
                ..SynthConfig::default()
            });
            (d, format!("synthetic(seed={})", a.seed), None)
        }
    };
    let before = raw.len();
    let clean = deduplicate(&raw);
    let removed = before - clean.len();
    let (absence, presence) = clean.class_counts();

    let mut header = config_lines("prepare", &input_desc, fingerprint.as_deref());
    header.push(format!("seed: {}", a.seed));
    header.push(format!("delimiter: {}", a.delimiter));

    let mut body = Vec::new();
    write_csv(&mut body, &clean, delimiter).context("serializing the cleaned dataset")?;
    let dataset_text = format!(
        "{}{}",
        hash_comment(&header),
        String::from_utf8(body).context("dataset serialization is not UTF-8")?
    );

    let mut summary = hash_comment(&header);
    let source_line = match &a.input {
        Some(path) => format!("source: {}", path.display()),
        None => format!("source: synthetic corpus, seed {}", a.seed),
    };
    let _ = writeln!(summary, "{source_line}");
    let _ = writeln!(summary, "rows before deduplication: {before}");
    let _ = writeln!(summary, "duplicate rows removed: {removed}");
    let _ = writeln!(summary, "rows after deduplication: {}", clean.len());
    let _ = writeln!(summary, "class 0 (absence): {absence}");
    let _ = writeln!(summary, "class 1 (presence): {presence}");

    write_outputs(
        &a.out,
        &[
            ("dataset.csv".into(), dataset_text),
            ("prepare_summary.txt".into(), summary),
        ],
    )?;
    println!(
        "prepare: {before} -> {} records ({removed} duplicate rows removed); \
         absence {absence}, presence {presence}",
        clean.len()
    );
    println!(
        "prepare: wrote dataset.csv and prepare_summary.txt under {}",
        a.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

fn cmd_run(a: RunArgs) -> Result<()> {
    let delimiter = parse_delimiter(&a.delimiter)?;
    let input = a.input.clone().unwrap_or_else(|| a.out.join("dataset.csv"));
    let d = load_dataset(&input, delimiter, a.input.is_none())?;
    let fingerprint = sha256_hex(&input)?;
    let classifiers = parse_algorithms(&a.algorithms)?;
    let protocols = parse_protocols(&a.protocols)?;
    let params = build_params(a.seed, a.min_leaf, a.max_depth, a.k, a.trees);

    let mut header = config_lines("run", &file_name(&input), Some(&fingerprint));
    header.push(format!("seed: {}", a.seed));
    header.push(format!(
        "algorithms: {}",
        classifiers
            .iter()
            .map(|c| c.name())
            .collect::<Vec<_>>()
            .join(",")
    ));
    header.push(format!(
        "protocols: {}",
        protocols
            .iter()
            .map(|p| p.label())
            .collect::<Vec<_>>()
            .join(",")
    ));
    header.push(format!("hyperparameters: {}", knob_summary(&params)));

    let mut reports: Vec<EvaluationReport> = Vec::new();
    for &classifier in &classifiers {
        for &protocol in &protocols {
            let report = evaluate(classifier, &d, protocol, a.seed, &params)?;
            println!(
                "run: {:<8} {:<9} accuracy={} ({} ms)",
                report.classifier.name(),
                report.protocol.label(),
                report.scores.accuracy,
                report.wall_time.as_millis()
            );
            reports.push(report);
        }
    }

    let table = compare(&reports);
    let mut files: Vec<(String, String)> = reports
        .iter()
        .map(|r| {
            (
                format!("report_{}_{}.txt", r.classifier.name(), r.protocol.label()),
                format!("{}{}", hash_comment(&header), r.render()),
            )
        })
        .collect();
    files.push((
        "comparison.md".into(),
        format!("{}{}", xml_comment(&header), table.to_markdown()),
    ));
    files.push((
        "comparison.csv".into(),
        format!("{}{}", hash_comment(&header), table.to_csv()),
    ));

    write_outputs(&a.out, &files)?;
    println!(
        "run: wrote {} reports, comparison.md, and comparison.csv under {}",
        reports.len(),
        a.out.display()
    );
    Ok(())
}

fn evaluate(
    classifier: ClassifierId,
    d: &Dataset,
    protocol: Protocol,
    seed: u64,
    params: &HyperParams,
) -> Result<EvaluationReport> {
    let report = match protocol {
        Protocol::Folds(k) => evaluate_cv(classifier, d, k, seed, params)?,
        Protocol::Split(fraction) => {
            let spec = SplitSpec {
                train_fraction: fraction,
                seed,
                ..SplitSpec::default()
            };
            evaluate_split(classifier, d, &spec, params)?
        }
    };
    Ok(report)
}

// ---------------------------------------------------------------------------
// ontology
// ---------------------------------------------------------------------------

/// Everything one inference pass over a test partition produces.
struct InferencePass {
    rules: RuleSet,
    turtle: String,
    summary: InferenceSummary,
    confusion: ConfusionMatrix,
    individuals: usize,
}

/// Train a tree on `train_set`, extract rules, infer over `test_set`, and
/// score the inferred classes against the recorded ones.
fn inference_pass(
    train_set: &Dataset,
    test_set: &Dataset,
    params: &HyperParams,
) -> Result<InferencePass> {
    let tree = match train(AlgorithmId::DecisionTree, train_set, params)? {
        TrainedModel::Tree(t) => t,
        _ => unreachable!("decision tree training returns a tree"),
    };
    let rules = extract_rules(&tree);
    let mut ontology = build_ontology(test_set);
    let summary = infer(&mut ontology, &rules)?;
    let (inferred, recorded) = inferred_vs_recorded(&ontology);
    let confusion = ConfusionMatrix::from_pairs(recorded.into_iter().zip(inferred));
    Ok(InferencePass {
        rules,
        turtle: export_turtle(&ontology),
        summary,
        confusion,
        individuals: test_set.len(),
    })
}

fn cmd_ontology(a: OntologyArgs) -> Result<()> {
    let delimiter = parse_delimiter(&a.delimiter)?;
    let input = a.input.clone().unwrap_or_else(|| a.out.join("dataset.csv"));
    let d = load_dataset(&input, delimiter, a.input.is_none())?;
    let fingerprint = sha256_hex(&input)?;
    let protocol = parse_protocol(&a.protocol)?;
    let params = build_params(a.seed, a.min_leaf, a.max_depth, None, None);
    let started = Instant::now();

    // The exported artifacts come from one training pass; under k-fold that
    // is fold 0, while the scored report pools every fold exactly as `run`
    // does, so both subcommands publish identical numbers.
    let (artifacts, pooled, total, fold_lines, artifact_note) = match protocol {
        Protocol::Split(fraction) => {
            let spec = SplitSpec {
                train_fraction: fraction,
                seed: a.seed,
                ..SplitSpec::default()
            };
            let (train_set, test_set) = percentage_split(&d, &spec, a.seed)?;
            let pass = inference_pass(&train_set, &test_set, &params)?;
            let pooled = pass.confusion;
            let total = pass.summary;
            let individuals = pass.individuals;
            (
                pass,
                pooled,
                total,
                vec![format!(
                    "split test partition: individuals={individuals}, {total}"
                )],
                format!(
                    "rules and ontology exported from the {} training partition",
                    protocol.label()
                ),
            )
        }
        Protocol::Folds(k) => {
            let folds = stratified_folds(&d, k, a.seed, true)?;
            let mut pooled = ConfusionMatrix::default();
            let mut total = InferenceSummary::default();
            let mut fold_lines = Vec::new();
            let mut first: Option<InferencePass> = None;
            for (fold_no, test_indices) in folds.iter().enumerate() {
                let mut in_test = vec![false; d.len()];
                for &i in test_indices {
                    in_test[i] = true;
                }
                let train_indices: Vec<usize> =
                    (0..d.len()).filter(|i| !in_test[*i]).collect();
                let train_set = d.subset(&train_indices);
                let test_set = d.subset(test_indices);
                let mut fold_params = params.clone();
                fold_params.seed = derive_seed(params.seed, fold_no as u64);
                let pass = inference_pass(&train_set, &test_set, &fold_params)?;
                pooled += pass.confusion;
                total.presence += pass.summary.presence;
                total.absence += pass.summary.absence;
                total.fallbacks += pass.summary.fallbacks;
                fold_lines.push(format!(
                    "fold {fold_no}: individuals={}, {}",
                    pass.individuals, pass.summary
                ));
                if first.is_none() {
                    first = Some(pass);
                }
            }
            (
                first.expect("fold count is validated to be at least 2"),
                pooled,
                total,
                fold_lines,
                "rules and ontology exported from fold 0; counts and scores pooled over all folds"
                    .to_string(),
            )
        }
    };
    let wall_time = started.elapsed();

    let mut header = config_lines("ontology", &file_name(&input), Some(&fingerprint));
    header.push(format!("seed: {}", a.seed));
    header.push(format!("protocol: {}", protocol.label()));
    header.push(format!("hyperparameters: {}", knob_summary(&params)));
    header.push(artifact_note);

    let scored = total.presence + total.absence;
    let mut summary_text = hash_comment(&header);
    let _ = writeln!(summary_text, "scored individuals: {scored}");
    let _ = writeln!(summary_text, "{total}");
    let _ = writeln!(summary_text, "rules: {}", artifacts.rules.rules.len());
    for line in &fold_lines {
        let _ = writeln!(summary_text, "{line}");
    }

    let report = EvaluationReport {
        classifier: ClassifierId::Ontology,
        protocol,
        confusion: pooled,
        scores: MetricSet::from_confusion(&pooled),
        hyperparams: params.describe(AlgorithmId::DecisionTree),
        seed: a.seed,
        wall_time,
    };

    let files = vec![
        (
            "rules.swrl".into(),
            format!("{}{}", hash_comment(&header), serialize_swrl(&artifacts.rules)),
        ),
        (
            "ontology.ttl".into(),
            format!("{}{}", hash_comment(&header), artifacts.turtle),
        ),
        ("inference_summary.txt".into(), summary_text),
        (
            format!("report_ontology_{}.txt", protocol.label()),
            format!("{}{}", hash_comment(&header), report.render()),
        ),
    ];
    write_outputs(&a.out, &files)?;
    println!(
        "ontology: {} rules; scored individuals: {scored}; {total}",
        artifacts.rules.rules.len()
    );
    println!(
        "ontology: accuracy={} over {}; wrote rules.swrl, ontology.ttl, \
         inference_summary.txt, report_ontology_{}.txt under {}",
        report.scores.accuracy,
        protocol.label(),
        protocol.label(),
        a.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// figures
// ---------------------------------------------------------------------------

/// One table cell as drawn: the parsed value (bar height) when it is a
/// number, and the text printed above or in place of the bar.
#[derive(Debug, Clone)]
struct ChartCell {
    value: Option<f64>,
    label: String,
}

fn chart_cell(text: &str) -> Result<ChartCell> {
    match text {
        "-" => Ok(ChartCell {
            value: None,
            label: "n/a".into(),
        }),
        "undefined" => Ok(ChartCell {
            value: None,
            label: "undef".into(),
        }),
        number => {
            let v: f64 = number
                .parse()
                .map_err(|_| anyhow::anyhow!("metric cell `{number}` is not a number"))?;
            if !(0.0..=1.0).contains(&v) {
                bail!("metric cell `{number}` is outside [0, 1]");
            }
            Ok(ChartCell {
                value: Some(v),
                label: number.to_string(),
            })
        }
    }
}

fn cmd_figures(a: FiguresArgs) -> Result<()> {
    let input = a.input.clone().unwrap_or_else(|| a.out.join("comparison.csv"));
    let text = fs::read_to_string(&input)
        .with_context(|| format!("cannot read `{}` (run `cardio run` first)", input.display()))?;
    let fingerprint = sha256_hex(&input)?;

    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header_line = lines
        .next()
        .context("comparison table has no header line")?;
    let columns: Vec<&str> = header_line.split(',').collect();
    if columns.len() != 9 || columns[0] != "classifier" {
        bail!(
            "`{}` is not a comparison table: expected 9 columns starting with `classifier`",
            input.display()
        );
    }
    let cv_label = columns[1]
        .strip_prefix("accuracy_")
        .context("second column must be `accuracy_<protocol>`")?
        .to_string();
    let split_label = columns[2]
        .strip_prefix("accuracy_")
        .context("third column must be `accuracy_<protocol>`")?
        .to_string();

    // rows[i] = (classifier, eight cells in header order)
    let mut rows: Vec<(String, Vec<ChartCell>)> = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            bail!("comparison row `{line}` does not have 9 fields");
        }
        let cells = fields[1..]
            .iter()
            .map(|f| chart_cell(f))
            .collect::<Result<Vec<_>>>()?;
        rows.push((fields[0].to_string(), cells));
    }
    if rows.is_empty() {
        bail!("comparison table has no rows");
    }

    let header = config_lines("figures", &file_name(&input), Some(&fingerprint));
    let metrics = ["accuracy", "precision", "recall", "f_measure"];
    let mut files = Vec::new();
    for (m, metric) in metrics.iter().enumerate() {
        let groups: Vec<(String, ChartCell, ChartCell)> = rows
            .iter()
            .map(|(name, cells)| (name.clone(), cells[2 * m].clone(), cells[2 * m + 1].clone()))
            .collect();
        let svg = render_chart(metric, &cv_label, &split_label, &groups, &header);
        files.push((format!("{metric}.svg"), svg));
    }
    write_outputs(&a.out, &files)?;
    println!(
        "figures: wrote accuracy.svg, precision.svg, recall.svg, f_measure.svg under {}",
        a.out.display()
    );
    Ok(())
}

/// Deterministic grouped bar chart: one group per classifier, one bar per
/// protocol, values labeled with the table's own cell text. Everything is
/// computed from the input strings, so identical tables render identical
/// bytes.
fn render_chart(
    metric: &str,
    cv_label: &str,
    split_label: &str,
    groups: &[(String, ChartCell, ChartCell)],
    config: &[String],
) -> String {
    const LEFT: f64 = 52.0;
    const RIGHT: f64 = 16.0;
    const TOP: f64 = 46.0;
    const BOTTOM: f64 = 56.0;
    const PLOT_H: f64 = 260.0;
    const GROUP_W: f64 = 96.0;
    const BAR_W: f64 = 34.0;
    const BAR_GAP: f64 = 6.0;
    const CV_FILL: &str = "#39648c";
    const SPLIT_FILL: &str = "#d9a441";

    let width = LEFT + GROUP_W * groups.len() as f64 + RIGHT;
    let height = TOP + PLOT_H + BOTTOM;
    let y = |v: f64| TOP + (1.0 - v) * PLOT_H;
    let baseline = y(0.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    s.push_str(&xml_comment(config));
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{LEFT:.1}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\" \
         font-weight=\"bold\" fill=\"#222222\">{}</text>",
        escape_text(metric)
    );

    // Legend, right-aligned: [swatch] label  [swatch] label
    let entry_w = |label: &str| 12.0 + 5.0 + label.len() as f64 * 6.5 + 14.0;
    let mut legend_x = width - RIGHT - entry_w(cv_label) - entry_w(split_label);
    for (label, fill) in [(cv_label, CV_FILL), (split_label, SPLIT_FILL)] {
        let _ = writeln!(
            s,
            "<rect x=\"{legend_x:.1}\" y=\"12\" width=\"12\" height=\"12\" fill=\"{fill}\"/>"
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"22\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"#222222\">{}</text>",
            legend_x + 17.0,
            escape_text(label)
        );
        legend_x += entry_w(label);
    }

    // Gridlines and y-axis labels at 0.0, 0.2, ..., 1.0.
    for t in 0..=5 {
        let v = t as f64 / 5.0;
        let yy = y(v);
        let _ = writeln!(
            s,
            "<line x1=\"{LEFT:.1}\" y1=\"{yy:.1}\" x2=\"{:.1}\" y2=\"{yy:.1}\" \
             stroke=\"#d8d8d8\" stroke-width=\"1\"/>",
            width - RIGHT
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" \
             fill=\"#555555\" text-anchor=\"end\">{v:.1}</text>",
            LEFT - 6.0,
            yy + 3.5
        );
    }
    let _ = writeln!(
        s,
        "<line x1=\"{LEFT:.1}\" y1=\"{TOP:.1}\" x2=\"{LEFT:.1}\" y2=\"{baseline:.1}\" \
         stroke=\"#444444\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{LEFT:.1}\" y1=\"{baseline:.1}\" x2=\"{:.1}\" y2=\"{baseline:.1}\" \
         stroke=\"#444444\" stroke-width=\"1\"/>",
        width - RIGHT
    );

    for (i, (name, cv, split)) in groups.iter().enumerate() {
        let gx = LEFT + GROUP_W * i as f64;
        let pad = (GROUP_W - (2.0 * BAR_W + BAR_GAP)) / 2.0;
        for (slot, (cell, fill)) in [(cv, CV_FILL), (split, SPLIT_FILL)].iter().enumerate() {
            let bx = gx + pad + slot as f64 * (BAR_W + BAR_GAP);
            let cx = bx + BAR_W / 2.0;
            match cell.value {
                Some(v) => {
                    let top = y(v);
                    let _ = writeln!(
                        s,
                        "<rect x=\"{bx:.1}\" y=\"{top:.1}\" width=\"{BAR_W:.1}\" \
                         height=\"{:.1}\" fill=\"{fill}\"/>",
                        baseline - top
                    );
                    let _ = writeln!(
                        s,
                        "<text x=\"{cx:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" \
                         font-size=\"10\" fill=\"#222222\" text-anchor=\"middle\">{}</text>",
                        top - 4.0,
                        escape_text(&cell.label)
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        "<text x=\"{cx:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" \
                         font-size=\"10\" fill=\"#888888\" text-anchor=\"middle\">{}</text>",
                        baseline - 4.0,
                        escape_text(&cell.label)
                    );
                }
            }
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"#222222\" text-anchor=\"middle\">{}</text>",
            gx + GROUP_W / 2.0,
            baseline + 18.0,
            escape_text(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

fn parse_delimiter(text: &str) -> Result<u8> {
    let bytes = match text {
        "\\t" | "tab" => return Ok(b'\t'),
        other => other.as_bytes(),
    };
    if bytes.len() != 1 {
        bail!("delimiter must be a single ASCII character, got `{text}`");
    }
    Ok(bytes[0])
}

/// Load an evaluation input and deduplicate it (a no-op on `prepare` output).
fn load_dataset(path: &Path, delimiter: u8, used_default: bool) -> Result<Dataset> {
    let d = load_csv(path, delimiter).with_context(|| {
        if used_default {
            format!(
                "cannot load `{}` (run `cardio prepare` first or pass --input)",
                path.display()
            )
        } else {
            format!("cannot load `{}`", path.display())
        }
    })?;
    Ok(deduplicate(&d))
}

fn sha256_hex(path: &Path) -> Result<String> {
    let bytes =
        fs::read(path).with_context(|| format!("cannot fingerprint `{}`", path.display()))?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    Ok(hex)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// The opening lines every output shares. Only the input's file name is
/// embedded (never its directory), so runs into different output trees stay
/// byte-identical; the SHA-256 fingerprint pins the exact content.
fn config_lines(subcommand: &str, input_desc: &str, sha: Option<&str>) -> Vec<String> {
    let mut lines = vec![
        format!("tool: cardio {subcommand}"),
        format!("input: {input_desc}"),
    ];
    if let Some(sha) = sha {
        lines.push(format!("input-sha256: {sha}"));
    }
    lines
}

/// The CLI-exposed hyperparameter knobs, rendered from their effective
/// values. Everything else always runs at the library defaults, which each
/// per-classifier report spells out in its own `hyperparameters:` line.
fn knob_summary(p: &HyperParams) -> String {
    format!(
        "min_leaf={} max_depth={} knn_k={} trees={} (library defaults otherwise)",
        p.min_leaf,
        p.max_depth
            .map_or_else(|| "none".to_string(), |d| d.to_string()),
        p.k,
        p.n_trees
    )
}

fn build_params(
    seed: u64,
    min_leaf: Option<usize>,
    max_depth: Option<usize>,
    k: Option<usize>,
    trees: Option<usize>,
) -> HyperParams {
    let mut params = HyperParams {
        seed,
        ..HyperParams::default()
    };
    if let Some(v) = min_leaf {
        params.min_leaf = v;
    }
    if let Some(v) = max_depth {
        params.max_depth = Some(v);
    }
    if let Some(v) = k {
        params.k = v;
    }
    if let Some(v) = trees {
        params.n_trees = v;
    }
    params
}

fn parse_algorithms(text: &str) -> Result<Vec<ClassifierId>> {
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok(ClassifierId::ALL.to_vec());
    }
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let id = ClassifierId::parse(token).with_context(|| {
            format!(
                "unknown classifier `{token}` (expected one of \
                 knn, nb, ann, svm, rf, lr, dt, ontology, or `all`)"
            )
        })?;
        if !out.contains(&id) {
            out.push(id);
        }
    }
    if out.is_empty() {
        bail!("no classifiers selected");
    }
    Ok(out)
}

fn parse_protocol(token: &str) -> Result<Protocol> {
    let compact = token.trim().to_ascii_lowercase().replace('-', "");
    if let Some(rest) = compact.strip_prefix("folds") {
        let k: usize = rest
            .parse()
            .ok()
            .filter(|k| *k >= 2)
            .with_context(|| format!("`{token}`: fold count must be an integer of at least 2"))?;
        return Ok(Protocol::Folds(k));
    }
    if let Some(rest) = compact.strip_prefix("split") {
        let percent: f64 = rest
            .parse()
            .ok()
            .filter(|p| *p > 0.0 && *p < 100.0)
            .with_context(|| {
                format!("`{token}`: split percentage must be strictly between 0 and 100")
            })?;
        return Ok(Protocol::Split(percent / 100.0));
    }
    bail!("unknown protocol `{token}` (expected folds<k> or split<percent>)");
}

fn parse_protocols(text: &str) -> Result<Vec<Protocol>> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let p = parse_protocol(token)?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        bail!("no protocols selected");
    }
    Ok(out)
}

/// `# `-prefixed comment block (text reports, CSV, SWRL, Turtle).
fn hash_comment(lines: &[String]) -> String {
    let mut out = String::new();
    for line in lines {
        let _ = writeln!(out, "# {line}");
    }
    out
}

/// XML comment block (Markdown, SVG). `--` cannot appear inside an XML
/// comment, so any run is broken up.
fn xml_comment(lines: &[String]) -> String {
    let mut out = String::from("<!--\n");
    for line in lines {
        let _ = writeln!(out, "{}", line.replace("--", "- -"));
    }
    out.push_str("-->\n");
    out
}

fn escape_text(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Create the output directory and write every file; called once per
/// subcommand, after all content has been computed.
fn write_outputs(out_dir: &Path, files: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory `{}`", out_dir.display()))?;
    for (name, content) in files {
        let path = out_dir.join(name);
        fs::write(&path, content)
            .with_context(|| format!("cannot write `{}`", path.display()))?;
    }
    Ok(())
}
