use anyhow::{bail, Result};
use treebench::greedy::{ccp_path, grow, GrowConfig, NumericMode};
use treebench::metrics::{accuracy, swa, ParetoCurve};
use treebench::optimal::full_budget;
use treebench::{BinaryDataset, Objective, Penalties, SolveLimits, Solver};

use crate::args::{Method, SwaArgs};
use crate::bench::synth_instance;
use crate::input::{create_dir, prepare, read_raw, write_file};
use crate::model::objective;

/// `(leaves, test accuracy)` of the optimal tree at every branching budget
/// up to the full tree of depth `max_depth`.
pub fn sweep_optimal(
    train: &BinaryDataset,
    test: &BinaryDataset,
    obj: &Objective,
    max_depth: usize,
) -> Result<Vec<(usize, f64)>> {
    let mut solver = Solver::new(train, *obj, Penalties::default())?;
    let mut runs = Vec::new();
    for budget in 0..=full_budget(max_depth) {
        let s = solver.solve(SolveLimits::new(max_depth, budget)?)?;
        runs.push((s.tree.leaf_count(), accuracy(&s.tree, test)?));
    }
    Ok(runs)
}

/// `(leaves, test accuracy)` along the cost-complexity path of a greedy
/// tree grown to `max_depth`.
pub fn sweep_greedy(
    train: &BinaryDataset,
    test: &BinaryDataset,
    obj: &Objective,
    max_depth: usize,
) -> Result<Vec<(usize, f64)>> {
    let cfg = GrowConfig {
        objective: *obj,
        max_depth: Some(max_depth),
        min_support: 1,
        numeric_mode: NumericMode::BinaryFeatures,
    };
    let path = ccp_path(&grow(train, &cfg)?, train)?;
    path.entries
        .iter()
        .map(|(_, t)| Ok((t.leaf_count(), accuracy(t, test)?)))
        .collect()
}

pub fn sweep(
    method: Method,
    train: &BinaryDataset,
    test: &BinaryDataset,
    obj: &Objective,
    max_depth: usize,
) -> Result<Vec<(usize, f64)>> {
    let runs = match method {
        Method::Optimal => sweep_optimal(train, test, obj, max_depth)?,
        Method::Greedy => sweep_greedy(train, test, obj, max_depth)?,
    };
    if runs.is_empty() {
        bail!("the sweep produced no trees");
    }
    Ok(runs)
}

/// Sweeps tree size, averages runs that share a size, and writes the curve
/// to `curve.csv` and `SWA_size` to `swa.json`.
pub fn run_swa_sweep(args: &SwaArgs) -> Result<f64> {
    let obj = objective(&args.objective)?;
    let (train, test) = match &args.data {
        Some(path) => {
            let Some(test_path) = &args.test else {
                bail!("--data needs --test for a size sweep");
            };
            let train_raw = read_raw(path, &args.label, None)?;
            let test_raw = read_raw(test_path, &args.label, None)?;
            let loaded = prepare(&train_raw, Some(&test_raw), &args.binarize)?;
            (loaded.train, loaded.test.expect("test given"))
        }
        None => {
            let inst = synth_instance(&args.synth, args.seed)?;
            (inst.train, inst.test)
        }
    };
    let runs = sweep(args.method, &train, &test, &obj, args.max_depth)?;
    let curve = ParetoCurve::from_runs(&runs)?;
    let value = swa(&curve, args.size)?;

    create_dir(&args.out)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["leaves", "accuracy"])?;
    for (leaves, acc) in &curve.points {
        w.write_record([leaves.to_string(), acc.to_string()])?;
    }
    write_file(&args.out.join("curve.csv"), &w.into_inner()?)?;
    let summary = serde_json::json!({
        "method": args.method.name(),
        "size": args.size,
        "swa": value,
    });
    write_file(
        &args.out.join("swa.json"),
        format!("{}\n", serde_json::to_string_pretty(&summary)?).as_bytes(),
    )?;
    println!("SWA_{} = {value:.4}", args.size);
    Ok(value)
}
