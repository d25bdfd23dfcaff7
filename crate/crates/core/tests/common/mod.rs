#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treebench::optimal::enumerate_trees;
use treebench::{objective_of_tree, BinaryDataset, Objective, ObjectiveKind, ObjectiveParams, Penalties, SolveLimits};

pub fn objective(kind: ObjectiveKind) -> Objective {
    Objective::new(kind, ObjectiveParams::default()).unwrap()
}

/// Random binary dataset with `n` instances and `p` features. Labels depend
/// weakly on the first feature so that splits matter.
pub fn random_dataset(seed: u64, n: usize, p: usize) -> BinaryDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density: f64 = rng.random_range(0.2..0.8);
    let rows: Vec<Vec<bool>> = (0..n)
        .map(|_| (0..p).map(|_| rng.random_bool(density)).collect())
        .collect();
    let labels: Vec<bool> = rows
        .iter()
        .map(|r| {
            if rng.random_bool(0.7) {
                r[0] ^ r[p - 1]
            } else {
                rng.random_bool(0.5)
            }
        })
        .collect();
    BinaryDataset::from_rows(&rows, &labels).unwrap()
}

pub fn dataset_strategy(max_n: usize, max_p: usize) -> impl Strategy<Value = BinaryDataset> {
    (1..=max_n, 1..=max_p, any::<u64>()).prop_map(|(n, p, seed)| random_dataset(seed, n, p))
}

/// Exhaustive minimum under (cost, branching nodes, canonical text).
pub fn brute_force(
    d: &BinaryDataset,
    obj: &Objective,
    limits: SolveLimits,
    pen: &Penalties,
) -> Option<(f64, usize, String)> {
    let mut best: Option<(f64, usize, String)> = None;
    for t in enumerate_trees(d, limits).unwrap() {
        let t = t.relabel_majority(d).unwrap();
        let v = objective_of_tree(&t, d, obj, pen).unwrap();
        if !v.is_finite() {
            continue;
        }
        let cand = (v, t.branching_count(), t.serialize());
        let better = match &best {
            None => true,
            Some(b) => cand.0 < b.0 || (cand.0 == b.0 && (cand.1, &cand.2) < (b.1, &b.2)),
        };
        if better {
            best = Some(cand);
        }
    }
    best
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
