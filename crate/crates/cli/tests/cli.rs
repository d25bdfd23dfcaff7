use std::fs;
use std::path::Path;
use std::process::Command;

use treebench::metrics::{swa, ParetoCurve};
use treebench::synth::{gen_tree_dataset, SyntheticTreeConfig};
use treebench::{objective_of_tree, Objective, ObjectiveKind, ObjectiveParams, Penalties, Tree};
use treebench_cli::report::REPORT_MARKER;
use treebench_cli::sweep::{sweep_greedy, sweep_optimal};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treebench"))
}

fn run(args: &[&str]) -> std::process::Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Report rows as maps from column name to value.
fn report_rows(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(REPORT_MARKER));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(l.as_bytes());
            let rec = r.records().next().unwrap().unwrap();
            header
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synth", "--n", "300", "--test-per-leaf", "50", "--out", p(dir)];
    args.extend_from_slice(extra);
    ok(&args);
}

#[test]
fn depth_zero_fit_is_one_leaf() {
    let dir = tempfile::tempdir().unwrap();
    synth(&dir.path().join("s"), &["--seed", "4"]);
    let out = dir.path().join("f");
    ok(&[
        "fit",
        "--data",
        p(&dir.path().join("s/train.csv")),
        "--max-depth",
        "0",
        "--out",
        p(&out),
    ]);
    assert_eq!(report_rows(&out.join("report.csv"))[0]["leaves"], "1");
}

#[test]
fn greedy_on_pure_data_is_one_leaf() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("pure.csv");
    fs::write(&data, "a,b,label\n0,1,1\n1,0,1\n1,1,1\n0,0,1\n").unwrap();
    let out = dir.path().join("f");
    ok(&["fit", "--method", "greedy", "--data", p(&data), "--out", p(&out)]);
    let row = &report_rows(&out.join("report.csv"))[0];
    assert_eq!(row["leaves"], "1");
    assert_eq!(row["train_acc"], "1");
}

#[test]
fn reported_objective_matches_emitted_tree() {
    let dir = tempfile::tempdir().unwrap();
    synth(&dir.path().join("s"), &["--seed", "8", "--class-noise", "0.2"]);
    let train_path = dir.path().join("s/train.csv");
    for kind in ["accuracy", "entropy", "bayes"] {
        let out = dir.path().join(kind);
        ok(&[
            "fit",
            "--objective",
            kind,
            "--lambda",
            "0.5",
            "--data",
            p(&train_path),
            "--out",
            p(&out),
        ]);
        let tree = Tree::from_json(&fs::read_to_string(out.join("tree.json")).unwrap()).unwrap();
        let raw = treebench::data::load_csv(&train_path, "label", None).unwrap();
        let train = treebench::BinaryDataset::from_raw_binary(&raw).unwrap();
        let obj = Objective::new(kind.parse().unwrap(), ObjectiveParams::default()).unwrap();
        let pen = Penalties {
            lambda_cost: 0.5,
            ..Penalties::default()
        };
        let value = objective_of_tree(&tree, &train, &obj, &pen).unwrap();
        let reported: f64 = report_rows(&out.join("report.csv"))[0]["objective_value"]
            .parse()
            .unwrap();
        assert_eq!(value, reported, "{kind}");
    }
}

#[test]
fn tune_writes_cv_table() {
    let dir = tempfile::tempdir().unwrap();
    synth(&dir.path().join("s"), &["--seed", "2"]);
    let out = dir.path().join("t");
    ok(&[
        "tune",
        "--tune",
        "depth",
        "--data",
        p(&dir.path().join("s/train.csv")),
        "--out",
        p(&out),
    ]);
    let cv = fs::read_to_string(out.join("cv.csv")).unwrap();
    // four depths times five folds
    assert_eq!(cv.lines().count(), 1 + 4 * 5);
}

#[test]
fn bench_row_count_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path, jobs: &str| {
        vec![
            "bench".to_string(),
            "--reps".into(),
            "10".into(),
            "--n".into(),
            "200".into(),
            "--test-per-leaf".into(),
            "20".into(),
            "--methods".into(),
            "optimal,greedy".into(),
            "--max-depth".into(),
            "3".into(),
            "--seed".into(),
            "5".into(),
            "--jobs".into(),
            jobs.into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let out = bin().args(args(&a, "1")).output().unwrap();
    assert!(out.status.success());
    assert_eq!(report_rows(&a).len(), 20);
    assert!(bin().args(args(&b, "3")).output().unwrap().status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn bench_resume_continues_where_it_stopped() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    let part = dir.path().join("part.csv");
    let base = ["bench", "--n", "150", "--test-per-leaf", "10", "--methods", "optimal"];
    let with = |reps: &str, out: &Path, resume: bool| {
        let mut v: Vec<&str> = base.to_vec();
        v.extend(["--reps", reps, "--out", out.to_str().unwrap()]);
        if resume {
            v.push("--resume");
        }
        v.into_iter().map(String::from).collect::<Vec<_>>()
    };
    assert!(bin().args(with("4", &full, false)).output().unwrap().status.success());
    assert!(bin().args(with("2", &part, false)).output().unwrap().status.success());
    // drop the last row to simulate an interrupted run
    let text = fs::read_to_string(&part).unwrap();
    let kept: Vec<&str> = text.lines().take(text.lines().count() - 1).collect();
    fs::write(&part, kept.join("\n") + "\n").unwrap();
    assert!(bin().args(with("4", &part, true)).output().unwrap().status.success());
    assert_eq!(fs::read(&full).unwrap(), fs::read(&part).unwrap());
}

#[test]
fn bench_records_failures_and_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let status = run(&[
        "bench",
        "--reps",
        "2",
        "--n",
        "100",
        "--test-per-leaf",
        "5",
        "--methods",
        "optimal",
        "--tune",
        "size",
        "--k",
        "1",
        "--out",
        p(&out),
    ])
    .status;
    assert_eq!(status.code(), Some(2));
    let rows = report_rows(&out);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| !r["error"].is_empty()));
}

#[test]
fn config_errors_exit_one() {
    assert_eq!(run(&["fit", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        run(&["fit", "--data", "/nonexistent.csv", "--out", "/tmp/x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&[
            "bench",
            "--methods",
            "optimal",
            "--max-depth",
            "none",
            "--out",
            "/tmp/x.csv"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn rank_from_score_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("s.csv");
    fs::write(&scores, "dataset,a,b,c\nd1,90,85,80\nd2,84.04,84.01,70\n").unwrap();
    let out = dir.path().join("r.json");
    ok(&["rank", "--scores", p(&scores), "--out", p(&out)]);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["average_ranks"], serde_json::json!([1.25, 1.75, 3.0]));
}

#[test]
fn swa_single_size_and_duplicates() {
    // a depth-0 sweep yields only the root leaf
    let cfg = SyntheticTreeConfig {
        n: 200,
        test_per_leaf: 20,
        seed: 1,
        ..SyntheticTreeConfig::default()
    };
    let b = gen_tree_dataset(&cfg).unwrap();
    let obj = Objective::new(ObjectiveKind::Accuracy, ObjectiveParams::default()).unwrap();
    let runs = sweep_optimal(&b.train, &b.test, &obj, 0).unwrap();
    assert_eq!(runs.len(), 1);
    let curve = ParetoCurve::from_runs(&runs).unwrap();
    assert_eq!(swa(&curve, 16).unwrap(), runs[0].1);
    let curve = ParetoCurve::from_runs(&[(1, 0.5), (2, 0.6), (2, 0.8)]).unwrap();
    assert!((curve.points[&2] - 0.7).abs() < 1e-12);
}

#[test]
fn optimal_swa_beats_greedy_on_noiseless_truths() {
    let acc = Objective::new(ObjectiveKind::Accuracy, ObjectiveParams::default()).unwrap();
    let gini = Objective::new(ObjectiveKind::Gini, ObjectiveParams::default()).unwrap();
    let mut wins = 0;
    for seed in 0..50 {
        let cfg = SyntheticTreeConfig {
            n: 1000,
            test_per_leaf: 100,
            seed,
            ..SyntheticTreeConfig::default()
        };
        let b = gen_tree_dataset(&cfg).unwrap();
        let opt = ParetoCurve::from_runs(&sweep_optimal(&b.train, &b.test, &acc, 4).unwrap()).unwrap();
        let gr = ParetoCurve::from_runs(&sweep_greedy(&b.train, &b.test, &gini, 4).unwrap()).unwrap();
        if swa(&opt, 16).unwrap() >= swa(&gr, 16).unwrap() {
            wins += 1;
        }
    }
    assert!(wins >= 35, "optimal ahead on {wins} of 50");
}

#[test]
fn synth_and_swa_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["x", "y"] {
        ok(&[
            "synth",
            "--kind",
            "linear",
            "--n",
            "100",
            "--test-size",
            "50",
            "--seed",
            "3",
            "--out",
            p(&dir.path().join(name)),
        ]);
        ok(&[
            "swa",
            "--method",
            "greedy",
            "--n",
            "200",
            "--test-per-leaf",
            "10",
            "--out",
            p(&dir.path().join(format!("w{name}"))),
        ]);
    }
    for f in ["train.csv", "test.csv", "truth.json", "train_raw.csv", "test_raw.csv"] {
        assert_eq!(
            fs::read(dir.path().join("x").join(f)).unwrap(),
            fs::read(dir.path().join("y").join(f)).unwrap()
        );
    }
    for f in ["curve.csv", "swa.json"] {
        assert_eq!(
            fs::read(dir.path().join("wx").join(f)).unwrap(),
            fs::read(dir.path().join("wy").join(f)).unwrap()
        );
    }
}
