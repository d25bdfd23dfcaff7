mod common;

use common::*;
use proptest::prelude::*;
use treebench::synth::{gen_tree_dataset, SyntheticTreeConfig};
use treebench::tuning::*;
use treebench::*;

fn config(method: TuneMethod, k: usize, max_depth: usize) -> TuneConfig {
    TuneConfig {
        objective: objective(ObjectiveKind::Accuracy),
        method,
        k,
        max_depth,
        penalties: Penalties::default(),
        seed: 7,
    }
}

proptest! {
    #[test]
    fn grids_contain_unconstraining_setting(
        method_idx in 1usize..7,
        k in 2usize..=20,
        n in 2usize..5000,
        majority in 0.5f64..0.99,
        depth in 1usize..=6,
    ) {
        let method = TuneMethod::ALL[method_idx];
        let g = make_grid(method, k, n, majority, depth).unwrap();
        prop_assert!(g.values.windows(2).all(|w| w[0] < w[1]), "{:?}", g.values);
        prop_assert!(g.values.len() <= k + 1);
        let v = &g.values;
        match method {
            TuneMethod::Depth => {
                prop_assert_eq!(v[0], 0.0);
                prop_assert_eq!(*v.last().unwrap(), depth as f64);
            }
            TuneMethod::Size => {
                prop_assert_eq!(v[0], 0.0);
                prop_assert_eq!(*v.last().unwrap(), ((1usize << depth) - 1) as f64);
                prop_assert!(v.iter().all(|x| x.fract() == 0.0));
            }
            TuneMethod::ComplexityCost => {
                prop_assert_eq!(v[0], 0.0);
                prop_assert_eq!(*v.last().unwrap(), 0.05);
            }
            TuneMethod::MinSupport => prop_assert_eq!(support_count(v[0], n), 1),
            TuneMethod::QuestionLength | TuneMethod::Smoothing => prop_assert_eq!(v[0], 0.0),
            TuneMethod::None => {}
        }
    }
}

#[test]
fn zero_settings_present() {
    for method in [
        TuneMethod::ComplexityCost,
        TuneMethod::QuestionLength,
        TuneMethod::Smoothing,
    ] {
        for k in [2, 5, 16] {
            assert_eq!(make_grid(method, k, 500, 0.6, 4).unwrap().values[0], 0.0);
        }
    }
    assert!(make_grid(TuneMethod::Depth, 1, 100, 0.6, 3).is_err());
    assert!(make_grid(TuneMethod::Depth, 4, 100, 0.6, 0).is_err());
    assert!(make_grid(TuneMethod::MinSupport, 4, 100, 1.0, 3).is_err());
}

#[test]
fn no_tuning_is_one_solve() {
    let d = random_dataset(3, 120, 6);
    let r = tune(&d, &config(TuneMethod::None, 16, 3)).unwrap();
    assert_eq!(r.solver_calls, 1);
    assert!(r.cv_table.is_empty());
    let direct = solve(
        &d,
        &objective(ObjectiveKind::Accuracy),
        SolveLimits::depth(3),
        &Penalties::default(),
    )
    .unwrap();
    assert_eq!(r.solution.tree, direct.tree);
}

#[test]
fn depth_tuning_call_count() {
    let d = random_dataset(4, 150, 6);
    let r = tune(&d, &config(TuneMethod::Depth, 16, 3)).unwrap();
    let folds = fold_count(150).unwrap();
    assert_eq!(r.grid.values.len(), 4);
    assert_eq!(r.solver_calls, 4 * folds + 1);
    assert_eq!(r.cv_table.len(), 4 * folds);
}

// Labels are the xor of two features, so three branching nodes already fit
// every fold; larger budgets return the same tree.
#[test]
fn size_ties_resolve_to_smaller_tree() {
    let base = random_dataset(21, 80, 5);
    let labels: Vec<bool> = (0..80).map(|i| base.instance(i)[1] ^ base.instance(i)[3]).collect();
    let d = base.with_labels(Bitset::from_bools(&labels)).unwrap();
    let r = tune(&d, &config(TuneMethod::Size, 16, 4)).unwrap();
    assert_eq!(r.chosen_value, 3.0);
    assert_eq!(r.solution.tree.branching_count(), 3);
}

#[test]
fn noiseless_synthetic_size_recovers_seven_nodes() {
    let mut hits = 0;
    for seed in 0..50 {
        let cfg = SyntheticTreeConfig {
            n: 1000,
            test_per_leaf: 1,
            seed,
            ..SyntheticTreeConfig::default()
        };
        let b = gen_tree_dataset(&cfg).unwrap();
        let r = tune(&b.train, &config(TuneMethod::Size, 16, 3)).unwrap();
        if r.chosen_value == 7.0 {
            hits += 1;
        }
    }
    assert!(hits > 25, "size 7 chosen in only {hits} of 50 runs");
}

#[test]
fn depth_tuning_does_least_work() {
    let d = random_dataset(5, 400, 12);
    let work = |m| tune(&d, &config(m, 8, 3)).unwrap().subproblems;
    let depth = work(TuneMethod::Depth);
    assert!(depth <= work(TuneMethod::Size));
    for m in [
        TuneMethod::ComplexityCost,
        TuneMethod::MinSupport,
        TuneMethod::QuestionLength,
        TuneMethod::Smoothing,
    ] {
        assert!(depth < work(m), "{m}");
    }
}

#[test]
fn tuning_is_deterministic() {
    let d = random_dataset(6, 200, 6);
    for m in TuneMethod::ALL {
        let a = tune(&d, &config(m, 6, 3)).unwrap();
        let b = tune(&d, &config(m, 6, 3)).unwrap();
        assert_eq!(a.solution.tree, b.solution.tree);
        assert_eq!(a.cv_table, b.cv_table);
    }
}

#[test]
fn regularized_settings_win_ties() {
    // A pure dataset: every setting reaches full validation accuracy.
    let d0 = random_dataset(8, 60, 4);
    let d = d0.with_labels(Bitset::ones(60)).unwrap();
    for m in [
        TuneMethod::ComplexityCost,
        TuneMethod::MinSupport,
        TuneMethod::QuestionLength,
        TuneMethod::Smoothing,
    ] {
        let r = tune(&d, &config(m, 5, 3)).unwrap();
        assert_eq!(r.chosen, r.grid.values.len() - 1, "{m}");
    }
    for m in [TuneMethod::Depth, TuneMethod::Size] {
        assert_eq!(tune(&d, &config(m, 5, 3)).unwrap().chosen, 0, "{m}");
    }
}
