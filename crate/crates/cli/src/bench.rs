use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use treebench::data::stratified_kfold_labels;
use treebench::metrics::{accuracy, tdr_fdr};
use treebench::synth::{gen_linear_dataset, gen_tree_dataset, SyntheticTreeConfig};
use treebench::{BinaryDataset, Bitset, Objective, RawDataset, Tree};

use crate::args::{BenchArgs, Method, SynthKind, SynthOptions};
use crate::input::{prepare, read_raw};
use crate::model::{objective, train, TrainSpec};
use crate::report::{num, opt, read_report, ReportWriter};

pub const BENCH_COLUMNS: [&str; 19] = [
    "run",
    "dataset",
    "seed",
    "method",
    "objective",
    "tune",
    "max_depth",
    "chosen_value",
    "n_train",
    "n_test",
    "train_acc",
    "test_acc",
    "leaves",
    "depth",
    "question_length",
    "tdr",
    "fdr",
    "wall_ms",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchSummary {
    pub rows: usize,
    pub failures: usize,
}

/// One train/test pair, with the ground truth when it is known.
pub struct Instance {
    pub train: BinaryDataset,
    pub test: BinaryDataset,
    pub truth: Option<Tree>,
}

pub fn synth_config(s: &SynthOptions, seed: u64) -> SyntheticTreeConfig {
    SyntheticTreeConfig {
        n: s.n,
        p: s.p,
        depth: s.truth_depth,
        feature_noise: s.feature_noise,
        class_noise: s.class_noise,
        test_per_leaf: s.test_per_leaf,
        min_leaf: s.min_leaf,
        seed,
    }
}

pub fn synth_instance(s: &SynthOptions, seed: u64) -> Result<Instance> {
    Ok(match s.kind {
        SynthKind::Tree => {
            let b = gen_tree_dataset(&synth_config(s, seed))?;
            Instance {
                train: b.train,
                test: b.test,
                truth: Some(b.truth),
            }
        }
        SynthKind::Linear => {
            let b = gen_linear_dataset(s.n, s.p, s.feature_noise, s.class_noise, s.test_size, seed)?;
            Instance {
                train: b.train,
                test: b.test,
                truth: None,
            }
        }
    })
}

/// Stratified holdout of the first of `folds` folds.
fn split_instance(raw: &RawDataset, args: &BenchArgs, seed: u64) -> Result<Instance> {
    let labels = Bitset::from_indices(raw.len(), (0..raw.len()).filter(|&i| raw.labels()[i] == 1));
    let folds = stratified_kfold_labels(&labels, args.holdout_folds, seed)?;
    let fold = &folds[0];
    let loaded = prepare(
        &raw.select(&fold.train),
        Some(&raw.select(&fold.validation)),
        &args.binarize,
    )?;
    Ok(Instance {
        train: loaded.train,
        test: loaded.test.expect("test split given"),
        truth: None,
    })
}

fn parse_depth(token: &str) -> Result<Option<usize>> {
    if token == "none" {
        return Ok(None);
    }
    token.parse().map(Some).with_context(|| format!("bad depth `{token}`"))
}

/// The method × depth × tuning matrix, dropping combinations a method does
/// not support.
pub fn bench_cells(args: &BenchArgs) -> Result<Vec<TrainSpec>> {
    let obj = objective(&args.objective)?;
    let greedy_obj = match args.greedy_objective {
        Some(kind) => Objective::new(kind, obj.params)?,
        None => obj,
    };
    let mut cells = Vec::new();
    for &method in &args.methods {
        let objective = if method == Method::Greedy { greedy_obj } else { obj };
        for token in &args.depths {
            let max_depth = parse_depth(token)?;
            for &tune in &args.tunes {
                let spec = TrainSpec {
                    method,
                    objective,
                    tune,
                    k: args.k,
                    max_depth,
                    max_branching: None,
                    penalties: Default::default(),
                    numeric_mode: args.binarize.numeric_mode,
                    seed: 0,
                };
                if spec.validate().is_ok() {
                    cells.push(spec);
                }
            }
        }
    }
    if cells.is_empty() {
        bail!("no runnable method, depth and tuning combination");
    }
    Ok(cells)
}

fn cell_row(spec: &TrainSpec, inst: &Instance, timing: bool) -> Result<Vec<String>> {
    let t = train(spec, &inst.train)?;
    let m = t.tree.metrics(&inst.test)?;
    let (tdr, fdr) = match &inst.truth {
        Some(truth) => {
            let (a, b) = tdr_fdr(&t.tree, truth);
            (Some(a), Some(b))
        }
        None => (None, None),
    };
    Ok(vec![
        opt(t.chosen_value),
        inst.train.instance_count().to_string(),
        inst.test.instance_count().to_string(),
        num(accuracy(&t.tree, &inst.train)?),
        num(accuracy(&t.tree, &inst.test)?),
        m.leaves.to_string(),
        m.depth.to_string(),
        num(m.question_length),
        opt(tdr),
        opt(fdr),
        if timing { num(t.wall_ms) } else { String::new() },
    ])
}

fn run_instance(
    run: usize,
    name: &str,
    seed: u64,
    inst: Result<Instance>,
    cells: &[TrainSpec],
    timing: bool,
) -> Vec<Vec<String>> {
    cells
        .iter()
        .map(|cell| {
            let spec = TrainSpec { seed, ..*cell };
            let mut row = vec![
                run.to_string(),
                name.to_string(),
                seed.to_string(),
                spec.method.name().to_string(),
                spec.objective.kind.name().to_string(),
                spec.tune.name().to_string(),
                spec.depth_label(),
            ];
            let result = inst
                .as_ref()
                .map_err(|e| anyhow::anyhow!("{e:#}"))
                .and_then(|inst| cell_row(&spec, inst, timing));
            match result {
                Ok(fields) => {
                    row.extend(fields);
                    row.push(String::new());
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(String::new(), BENCH_COLUMNS.len() - row.len() - 1));
                    row.push(format!("{e:#}"));
                }
            }
            row
        })
        .collect()
}

/// Runs every cell on every replication and writes one report row per
/// (replication, cell). Failed runs become rows with an `error` value.
pub fn run_benchmark(args: &BenchArgs) -> Result<BenchSummary> {
    let cells = bench_cells(args)?;
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let files: Vec<(String, RawDataset)> = args
        .datasets
        .iter()
        .map(|p| {
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            read_raw(p, &args.label, None).map(|raw| (name, raw))
        })
        .collect::<Result<_>>()?;
    // (dataset index, replication) in report order
    let runs: Vec<(Option<usize>, usize)> = if files.is_empty() {
        (0..args.reps).map(|r| (None, r)).collect()
    } else {
        (0..files.len())
            .flat_map(|f| (0..args.reps).map(move |r| (Some(f), r)))
            .collect()
    };

    let mut done = 0;
    let mut previous = Vec::new();
    if args.resume && args.out.exists() {
        let (header, rows) = read_report(&args.out)?;
        if header != BENCH_COLUMNS {
            bail!("{} has a different column layout", args.out.display());
        }
        done = (rows.len() / cells.len()).min(runs.len());
        previous = rows.into_iter().take(done * cells.len()).collect();
    }
    let mut writer = ReportWriter::create(&args.out, &BENCH_COLUMNS)?;
    let mut summary = BenchSummary { rows: 0, failures: 0 };
    let mut record = |row: &Vec<String>, summary: &mut BenchSummary| -> Result<()> {
        writer.row(row)?;
        summary.rows += 1;
        if !row.last().is_some_and(String::is_empty) {
            summary.failures += 1;
        }
        Ok(())
    };
    for row in &previous {
        record(row, &mut summary)?;
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build()?;
    for batch in runs[done..].chunks(args.jobs) {
        let offset = done;
        let results: Vec<Vec<Vec<String>>> = pool.install(|| {
            batch
                .par_iter()
                .enumerate()
                .map(|(i, &(file, rep))| {
                    let seed = args.seed.wrapping_add(rep as u64);
                    let (name, inst) = match file {
                        None => ("synthetic".to_string(), synth_instance(&args.synth, seed)),
                        Some(f) => (files[f].0.clone(), split_instance(&files[f].1, args, seed)),
                    };
                    run_instance(offset + i, &name, seed, inst, &cells, args.timing)
                })
                .collect()
        });
        for row in results.iter().flatten() {
            record(row, &mut summary)?;
        }
        done += batch.len();
    }
    Ok(summary)
}
