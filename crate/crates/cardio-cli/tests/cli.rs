//! Behavior tests for the `cardio` binary: every subcommand end to end on
//! small inputs, plus exit conventions and the no-partial-output guarantee.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cardio::data::write_csv;
use cardio::ontology::swrl::parse_swrl;
use cardio::ontology::turtle::import_turtle;
use cardio::synth::{generate, SynthConfig};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_cardio")
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(exe())
        .args(args)
        .output()
        .expect("the cardio binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Failure contract: exit code 1 and exactly one diagnostic line on stderr.
fn assert_single_line_failure(out: &Output) -> String {
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr).trim().to_string();
    assert!(
        stderr.starts_with("error:") && !stderr.contains('\n'),
        "diagnostic must be a single `error:` line, got: {stderr}"
    );
    stderr
}

/// A small generated patient table on disk, semicolon-delimited.
fn tiny_csv(dir: &Path, rows: usize, seed: u64) -> PathBuf {
    let d = generate(&SynthConfig {
        seed,
        rows,
        duplicate_rows: rows / 60,
        positive_rows: (rows - rows / 60) / 2,
    });
    let mut bytes = Vec::new();
    write_csv(&mut bytes, &d, b';').unwrap();
    let path = dir.join("patients.csv");
    fs::write(&path, bytes).unwrap();
    path
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("expected output file {name}: {e}"))
}

#[test]
fn help_lists_all_subcommands() {
    let out = run_cli(&["--help"]);
    assert_success(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["prepare", "run", "ontology", "figures"] {
        assert!(text.contains(sub), "help must mention `{sub}`");
    }
}

#[test]
fn prepare_without_input_synthesizes_the_stand_in_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let out = run_cli(&["prepare", "--out", out_dir.to_str().unwrap()]);
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("70000 -> 69976"), "stdout: {stdout}");

    let summary = read(&out_dir, "prepare_summary.txt");
    assert!(summary.contains("rows before deduplication: 70000"));
    assert!(summary.contains("duplicate rows removed: 24"));
    assert!(summary.contains("rows after deduplication: 69976"));
    assert!(summary.contains("class 0 (absence): 35004"));
    assert!(summary.contains("class 1 (presence): 34972"));
    assert!(summary.starts_with("# tool: cardio prepare"));
    assert!(out_dir.join("dataset.csv").exists());
}

#[test]
fn prepare_deduplicates_an_explicit_input() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tiny_csv(tmp.path(), 600, 11);
    let out_dir = tmp.path().join("out");
    let out = run_cli(&[
        "prepare",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_success(&out);
    let summary = read(&out_dir, "prepare_summary.txt");
    assert!(summary.contains("rows before deduplication: 600"));
    assert!(summary.contains("duplicate rows removed: 10"));
    assert!(summary.contains("rows after deduplication: 590"));
    // The written dataset reloads through the same tool.
    let again = run_cli(&[
        "prepare",
        "--input",
        out_dir.join("dataset.csv").to_str().unwrap(),
        "--out",
        tmp.path().join("again").to_str().unwrap(),
    ]);
    assert_success(&again);
    assert!(String::from_utf8_lossy(&again.stdout).contains("(0 duplicate rows removed)"));
}

#[test]
fn run_writes_reports_and_comparison_with_embedded_config() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tiny_csv(tmp.path(), 600, 11);
    let out_dir = tmp.path().join("out");
    let out = run_cli(&[
        "run",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--algorithms",
        "dt,lr",
        "--protocols",
        "folds10,split60",
        "--seed",
        "3",
    ]);
    assert_success(&out);

    for name in [
        "report_dt_folds-10.txt",
        "report_dt_split-60.txt",
        "report_lr_folds-10.txt",
        "report_lr_split-60.txt",
    ] {
        let report = read(&out_dir, name);
        assert!(report.starts_with("# tool: cardio run"), "{name}");
        assert!(report.contains("input-sha256: "), "{name}");
        assert!(report.contains("seed: 3"), "{name}");
        assert!(report.contains("confusion: TP="), "{name}");
        assert!(report.contains("accuracy: 0."), "{name}");
    }

    let csv = read(&out_dir, "comparison.csv");
    let header = csv
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("csv has a header");
    assert_eq!(
        header,
        "classifier,accuracy_folds-10,accuracy_split-60,precision_folds-10,precision_split-60,\
         recall_folds-10,recall_split-60,f_measure_folds-10,f_measure_split-60"
    );
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().any(|r| r.starts_with("dt,")));
    assert!(rows.iter().any(|r| r.starts_with("lr,")));

    let md = read(&out_dir, "comparison.md");
    assert!(md.starts_with("<!--\ntool: cardio run"));
    assert!(md.contains("| Classifier | Accuracy (folds-10) | Accuracy (split-60) |"));
}

#[test]
fn run_rejects_unknown_names_without_writing_anything() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tiny_csv(tmp.path(), 300, 5);
    let out_dir = tmp.path().join("out");

    let bad_alg = run_cli(&[
        "run",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--algorithms",
        "dt,bogus",
    ]);
    let msg = assert_single_line_failure(&bad_alg);
    assert!(msg.contains("bogus"));

    let bad_proto = run_cli(&[
        "run",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--protocols",
        "holdout",
    ]);
    let msg = assert_single_line_failure(&bad_proto);
    assert!(msg.contains("holdout"));

    assert!(
        !out_dir.exists(),
        "a failed run must not leave partial outputs"
    );
}

#[test]
fn run_points_at_prepare_when_the_default_input_is_missing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_cli(&["run", "--out", tmp.path().join("empty").to_str().unwrap()]);
    let msg = assert_single_line_failure(&out);
    assert!(msg.contains("cardio prepare"), "got: {msg}");
}

#[test]
fn ontology_split_exports_artifacts_that_parse_back() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tiny_csv(tmp.path(), 600, 11);
    let out_dir = tmp.path().join("out");
    let out = run_cli(&[
        "ontology",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--protocol",
        "split60",
        "--max-depth",
        "1",
    ]);
    assert_success(&out);

    let rules = parse_swrl(&read(&out_dir, "rules.swrl")).expect("rules.swrl parses");
    assert_eq!(rules.rules.len(), 2, "a depth-1 tree has exactly two leaves");

    let ontology = import_turtle(&read(&out_dir, "ontology.ttl")).expect("ontology.ttl parses");
    assert!(!ontology.individuals.is_empty());
    assert!(
        ontology
            .individuals
            .iter()
            .all(|i| i.inferred_class.is_some()),
        "exported individuals carry their inferred class"
    );

    let summary = read(&out_dir, "inference_summary.txt");
    let scored: usize = field_after(&summary, "scored individuals: ");
    let presence: usize = field_after(&summary, "inferred presence: ");
    let absence: usize = field_after(&summary, "absence: ");
    assert_eq!(presence + absence, scored);
    assert_eq!(scored, ontology.individuals.len());
    assert!(out_dir.join("report_ontology_split-60.txt").exists());
}

#[test]
fn figures_renders_bars_and_placeholders_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    fs::create_dir_all(&out_dir).unwrap();
    let table = "\
# tool: cardio run\n\
classifier,accuracy_folds-10,accuracy_split-60,precision_folds-10,precision_split-60,\
recall_folds-10,recall_split-60,f_measure_folds-10,f_measure_split-60\n\
dt,0.731,-,0.720,-,0.750,-,0.735,-\n\
nb,0.590,0.591,undefined,0.540,0.908,0.901,0.660,0.661\n";
    fs::write(out_dir.join("comparison.csv"), table).unwrap();

    let first = run_cli(&["figures", "--out", out_dir.to_str().unwrap()]);
    assert_success(&first);
    let accuracy = read(&out_dir, "accuracy.svg");
    assert!(accuracy.contains(">0.731<"));
    assert!(accuracy.contains(">n/a<"), "missing cells draw a placeholder");
    let precision = read(&out_dir, "precision.svg");
    assert!(precision.contains(">undef<"), "undefined cells are labeled");
    for name in ["accuracy.svg", "precision.svg", "recall.svg", "f_measure.svg"] {
        assert!(read(&out_dir, name).starts_with("<svg "), "{name}");
    }

    let snapshot = read(&out_dir, "accuracy.svg");
    let second = run_cli(&["figures", "--out", out_dir.to_str().unwrap()]);
    assert_success(&second);
    assert_eq!(snapshot, read(&out_dir, "accuracy.svg"), "byte-stable");
}

#[test]
fn figures_rejects_a_malformed_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    fs::create_dir_all(&out_dir).unwrap();
    fs::write(out_dir.join("comparison.csv"), "not,a,table\n").unwrap();
    let out = run_cli(&["figures", "--out", out_dir.to_str().unwrap()]);
    let msg = assert_single_line_failure(&out);
    assert!(msg.contains("not a comparison table"), "got: {msg}");
}

/// Parse the integer that follows `key` somewhere in `text`.
fn field_after(text: &str, key: &str) -> usize {
    let at = text.find(key).unwrap_or_else(|| panic!("missing `{key}` in:\n{text}"));
    text[at + key.len()..]
        .chars()
        .take_while(char::is_ascii_digit)
        .collect::<String>()
        .parse()
        .unwrap()
}
