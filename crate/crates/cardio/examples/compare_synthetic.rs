//! Scores every classifier on the synthetic corpus and prints one line per
//! classifier. Handy for eyeballing how the generator constants land.
//!
//! Usage: compare_synthetic [rows] [split|cv] [name,name,...]

use std::time::Instant;

use cardio::data::{deduplicate, SplitSpec};
use cardio::eval::{evaluate_cv, evaluate_split, ClassifierId};
use cardio::learners::HyperParams;
use cardio::synth::{generate, SynthConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let rows: usize = args.get(1).map_or(70_000, |s| s.parse().expect("rows"));
    let mode = args.get(2).map_or("split", String::as_str);
    let only: Option<Vec<&str>> = args.get(3).map(|s| s.split(',').collect());

    let scale = rows as f64 / 70_000.0;
    let config = SynthConfig {
        seed: 1,
        rows,
        duplicate_rows: (24.0 * scale).round() as usize,
        positive_rows: (34_972.0 * scale).round() as usize,
    };
    let started = Instant::now();
    let corpus = deduplicate(&generate(&config));
    println!(
        "rows={} deduped={} classes={:?} gen={:?}",
        rows,
        corpus.len(),
        corpus.class_counts(),
        started.elapsed()
    );

    let params = HyperParams::default();
    for id in ClassifierId::ALL {
        if let Some(only) = &only {
            if !only.contains(&id.name()) {
                continue;
            }
        }
        let t = Instant::now();
        let report = match mode {
            "cv" => evaluate_cv(id, &corpus, 10, 1, &params),
            _ => evaluate_split(id, &corpus, &SplitSpec::default(), &params),
        }
        .expect("evaluation");
        let s = report.scores;
        println!(
            "{:<20} acc={} prec={} rec={} f={}  [{:.1?}]",
            id.name(),
            s.accuracy,
            s.precision,
            s.recall,
            s.f_measure,
            t.elapsed()
        );
    }
}
