use anyhow::Result;
use treebench::metrics::accuracy;
use treebench::objective_of_tree;

use crate::args::FitArgs;
use crate::input::{create_dir, load, write_file};
use crate::model::{train, TrainSpec};
use crate::report::{num, opt, ReportWriter};

pub const FIT_COLUMNS: [&str; 16] = [
    "method",
    "objective",
    "tune",
    "chosen_value",
    "max_depth",
    "seed",
    "n_train",
    "n_test",
    "features",
    "train_acc",
    "test_acc",
    "objective_value",
    "leaves",
    "depth",
    "question_length",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub train_acc: f64,
    pub test_acc: Option<f64>,
    pub objective_value: f64,
    pub leaves: usize,
}

/// Trains one tree and writes `tree.json`, `tree.txt`, `report.csv`, the
/// binarizer when one was fitted, and with `emit_cv` the tuning table
/// `cv.csv`.
pub fn run_fit(args: &FitArgs, emit_cv: bool) -> Result<FitOutcome> {
    let spec = TrainSpec::from_args(args.method, &args.model, args.binarize.numeric_mode, args.seed)?;
    spec.validate()?;
    let data = load(&args.data, &args.binarize)?;
    let trained = train(&spec, &data.train)?;
    let tree = &trained.tree;

    let train_acc = accuracy(tree, &data.train)?;
    let test_acc = data.test.as_ref().map(|t| accuracy(tree, t)).transpose()?;
    let objective_value = objective_of_tree(tree, &data.train, &spec.objective, &spec.penalties)?;
    let eval = data.test.as_ref().unwrap_or(&data.train);
    let m = tree.metrics(eval)?;

    create_dir(&args.out)?;
    write_file(&args.out.join("tree.json"), tree.to_json().as_bytes())?;
    write_file(&args.out.join("tree.txt"), format!("{}\n", tree.serialize()).as_bytes())?;
    if let Some(b) = &data.binarizer {
        write_file(
            &args.out.join("binarizer.json"),
            serde_json::to_string_pretty(b)?.as_bytes(),
        )?;
    }
    let mut report = ReportWriter::create(&args.out.join("report.csv"), &FIT_COLUMNS)?;
    report.row(&[
        spec.method.name().to_string(),
        spec.objective.kind.name().to_string(),
        spec.tune.name().to_string(),
        opt(trained.chosen_value),
        spec.depth_label(),
        args.seed.to_string(),
        data.train.instance_count().to_string(),
        data.test
            .as_ref()
            .map(|t| t.instance_count().to_string())
            .unwrap_or_default(),
        data.train.feature_count().to_string(),
        num(train_acc),
        opt(test_acc),
        num(objective_value),
        m.leaves.to_string(),
        m.depth.to_string(),
        num(m.question_length),
        if args.timing {
            num(trained.wall_ms)
        } else {
            String::new()
        },
    ])?;
    if emit_cv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["setting", "value", "fold", "accuracy"])?;
        for (setting, value, fold, acc) in &trained.cv {
            w.write_record([setting.to_string(), num(*value), fold.clone(), opt(*acc)])?;
        }
        write_file(&args.out.join("cv.csv"), &w.into_inner()?)?;
    }
    println!(
        "{} leaves, train accuracy {:.4}{}",
        m.leaves,
        train_acc,
        test_acc.map(|a| format!(", test accuracy {a:.4}")).unwrap_or_default()
    );
    Ok(FitOutcome {
        train_acc,
        test_acc,
        objective_value,
        leaves: m.leaves,
    })
}
