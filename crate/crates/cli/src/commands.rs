use std::collections::BTreeMap;
use std::fs::File;

use anyhow::{bail, Context, Result};
use treebench::metrics::{average_ranks, nemenyi_cd, ScoreMatrix};
use treebench::synth::{gen_linear_dataset, gen_tree_dataset};

use crate::args::{BinarizeArgs, RankArgs, SynthArgs, SynthKind};
use crate::bench::synth_config;
use crate::input::{create_dir, load, write_binary_csv, write_file, write_raw_csv};
use crate::report::read_report;

pub fn run_binarize(args: &BinarizeArgs) -> Result<()> {
    let data = load(&args.data, &args.binarize)?;
    create_dir(&args.out)?;
    write_binary_csv(&args.out.join("train.csv"), &data.train, &args.data.label)?;
    if let Some(test) = &data.test {
        write_binary_csv(&args.out.join("test.csv"), test, &args.data.label)?;
    }
    if let Some(b) = &data.binarizer {
        write_file(
            &args.out.join("binarizer.json"),
            serde_json::to_string_pretty(b)?.as_bytes(),
        )?;
    }
    println!("{} binary features", data.train.feature_count());
    Ok(())
}

/// Writes binary `train.csv`/`test.csv`, the raw features in
/// `train_raw.csv`/`test_raw.csv`, and the ground truth in `truth.json`.
pub fn run_synth(args: &SynthArgs) -> Result<()> {
    create_dir(&args.out)?;
    let out = &args.out;
    let s = &args.synth;
    let truth = match s.kind {
        SynthKind::Tree => {
            let b = gen_tree_dataset(&synth_config(s, args.seed))?;
            write_binary_csv(&out.join("train.csv"), &b.train, "label")?;
            write_binary_csv(&out.join("test.csv"), &b.test, "label")?;
            write_raw_csv(&out.join("train_raw.csv"), &b.train_raw, "label")?;
            write_raw_csv(&out.join("test_raw.csv"), &b.test_raw, "label")?;
            if b.infeasible {
                eprintln!("warning: no feasible split, the truth is a single leaf");
            }
            b.truth.to_json()
        }
        SynthKind::Linear => {
            let b = gen_linear_dataset(s.n, s.p, s.feature_noise, s.class_noise, s.test_size, args.seed)?;
            write_binary_csv(&out.join("train.csv"), &b.train, "label")?;
            write_binary_csv(&out.join("test.csv"), &b.test, "label")?;
            write_raw_csv(&out.join("train_raw.csv"), &b.train_raw, "label")?;
            write_raw_csv(&out.join("test_raw.csv"), &b.test_raw, "label")?;
            serde_json::json!({ "weights": b.weights, "bias": b.bias }).to_string()
        }
    };
    write_file(&out.join("truth.json"), format!("{truth}\n").as_bytes())
}

/// Test accuracy percentages from a benchmark report, one row per run and
/// one column per method/tuning/depth combination.
pub fn scores_from_report(path: &std::path::Path) -> Result<ScoreMatrix> {
    let (header, rows) = read_report(path)?;
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("report has no `{name}` column"))
    };
    let (run, dataset, method, tune, depth, acc, error) = (
        col("run")?,
        col("dataset")?,
        col("method")?,
        col("tune")?,
        col("max_depth")?,
        col("test_acc")?,
        col("error")?,
    );
    let mut methods: Vec<String> = Vec::new();
    let mut table: BTreeMap<usize, (String, BTreeMap<String, f64>)> = BTreeMap::new();
    for row in &rows {
        if !row[error].is_empty() {
            bail!("run {} has a failed cell: {}", row[run], row[error]);
        }
        let label = format!("{}/{}/d{}", row[method], row[tune], row[depth]);
        if !methods.contains(&label) {
            methods.push(label.clone());
        }
        let id: usize = row[run].parse().context("bad run id")?;
        let value: f64 = row[acc].parse().context("bad test accuracy")?;
        let entry = table
            .entry(id)
            .or_insert_with(|| (format!("{}#{id}", row[dataset]), BTreeMap::new()));
        entry.1.insert(label, value * 100.0);
    }
    let mut datasets = Vec::new();
    let mut scores = Vec::new();
    for (name, cells) in table.into_values() {
        let row = methods
            .iter()
            .map(|m| cells.get(m).copied().with_context(|| format!("{name} lacks {m}")))
            .collect::<Result<Vec<f64>>>()?;
        datasets.push(name);
        scores.push(row);
    }
    Ok(ScoreMatrix::new(methods, datasets, scores)?)
}

pub fn run_rank(args: &RankArgs) -> Result<serde_json::Value> {
    let matrix = match (&args.scores, &args.report) {
        (Some(p), _) => {
            let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            ScoreMatrix::read_csv(file)?
        }
        (None, Some(p)) => scores_from_report(p)?,
        (None, None) => bail!("give --scores or --report"),
    };
    let ranks = average_ranks(&matrix)?;
    let cd = nemenyi_cd(matrix.methods.len(), matrix.datasets.len(), args.alpha).ok();
    let out = serde_json::json!({
        "methods": matrix.methods,
        "average_ranks": ranks,
        "datasets": matrix.datasets.len(),
        "alpha": args.alpha,
        "critical_distance": cd,
    });
    let text = format!("{}\n", serde_json::to_string_pretty(&out)?);
    match &args.out {
        Some(p) => write_file(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(out)
}
