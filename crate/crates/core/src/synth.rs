//! Synthetic benchmarks with a known ground truth: random trees over
//! quantile-binarized uniform features, and random linear separators.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::data::{
    binarize_apply, binarize_apply_aligned, binarize_fit, Binarizer, BinaryDataset, Predicate, RawDataset,
};
use crate::error::{Error, Result};
use crate::tree::Tree;

/// Quantile thresholds per feature when binarizing synthetic data.
pub const SYNTH_QUANTILES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTreeConfig {
    pub n: usize,
    pub p: usize,
    pub depth: usize,
    /// Half-width of the uniform feature noise.
    pub feature_noise: f64,
    /// Fraction of train labels flipped.
    pub class_noise: f64,
    pub test_per_leaf: usize,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for SyntheticTreeConfig {
    fn default() -> Self {
        SyntheticTreeConfig {
            n: 1000,
            p: 3,
            depth: 3,
            feature_noise: 0.0,
            class_noise: 0.0,
            test_per_leaf: 1000,
            min_leaf: 5,
            seed: 0,
        }
    }
}

impl SyntheticTreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidParameter("need at least one feature".into()));
        }
        if self.min_leaf == 0 {
            return Err(Error::InvalidParameter("min_leaf must be >= 1".into()));
        }
        if self.n < 2 * self.min_leaf {
            return Err(Error::InvalidParameter(format!(
                "n = {} is below twice the minimum leaf size {}",
                self.n, self.min_leaf
            )));
        }
        if !(0.0..=0.5).contains(&self.class_noise) {
            return Err(Error::InvalidParameter(format!(
                "class noise {} outside [0, 0.5]",
                self.class_noise
            )));
        }
        if !(self.feature_noise >= 0.0 && self.feature_noise.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "feature noise {} must be nonnegative",
                self.feature_noise
            )));
        }
        if self.depth > 16 {
            return Err(Error::InvalidParameter(format!("truth depth {} too large", self.depth)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticBundle {
    /// Noisy features, labels from the truth plus class noise.
    pub train: BinaryDataset,
    /// Noise-free, binarized with the train thresholds.
    pub test: BinaryDataset,
    pub truth: Tree,
    pub truth_features: BTreeSet<usize>,
    /// No split with `min_leaf` instances per side existed; the truth is a
    /// single leaf.
    pub infeasible: bool,
    pub binarizer: Binarizer,
    pub train_raw: RawDataset,
    pub test_raw: RawDataset,
}

fn feature_names(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("x{j}")).collect()
}

fn uniform_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..p).map(|_| rng.random::<f64>()).collect()).collect()
}

fn add_feature_noise(rng: &mut ChaCha8Rng, clean: &[Vec<f64>], f: f64) -> Vec<Vec<f64>> {
    clean
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| if f > 0.0 { v + rng.random_range(-f..=f) } else { v })
                .collect()
        })
        .collect()
}

fn bits_to_labels(bits: &Bitset) -> Vec<u8> {
    bits.to_bools().into_iter().map(u8::from).collect()
}

/// Flips exactly `⌊c·len⌋` labels at positions drawn uniformly without
/// replacement.
pub fn flip_class_noise(labels: &Bitset, c: f64, seed: u64) -> Result<Bitset> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidParameter(format!("class noise {c} outside [0, 1]")));
    }
    let len = labels.len();
    // guard against products like 0.29 · 100 = 28.999…
    let count = ((c * len as f64) + 1e-9).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = labels.clone();
    for i in sample(&mut rng, len, count.min(len)) {
        out.flip(i);
    }
    Ok(out)
}

// Truth tree under construction.
enum Proto {
    Leaf { subset: Bitset, depth: usize },
    Branch { feature: usize, left: usize, right: usize },
}

fn grow_truth(rng: &mut ChaCha8Rng, d: &BinaryDataset, max_depth: usize, min_leaf: usize) -> Vec<Proto> {
    let mut nodes = vec![Proto::Leaf {
        subset: Bitset::ones(d.instance_count()),
        depth: 0,
    }];
    loop {
        let mut feasible = Vec::new();
        for (id, node) in nodes.iter().enumerate() {
            let Proto::Leaf { subset, depth } = node else { continue };
            if *depth >= max_depth {
                continue;
            }
            let n = subset.count_ones();
            for (f, bits) in d.features().iter().enumerate() {
                let right = subset.intersection_count(bits);
                if right >= min_leaf && n - right >= min_leaf {
                    feasible.push((id, f));
                }
            }
        }
        if feasible.is_empty() {
            return nodes;
        }
        let (id, f) = feasible[rng.random_range(0..feasible.len())];
        let Proto::Leaf { subset, depth } = std::mem::replace(
            &mut nodes[id],
            Proto::Leaf {
                subset: Bitset::zeros(0),
                depth: 0,
            },
        ) else {
            unreachable!()
        };
        let bits = d.feature(f);
        let left = nodes.len();
        nodes.push(Proto::Leaf {
            subset: subset.and_not(bits),
            depth: depth + 1,
        });
        nodes.push(Proto::Leaf {
            subset: subset.and(bits),
            depth: depth + 1,
        });
        nodes[id] = Proto::Branch {
            feature: f,
            left,
            right: left + 1,
        };
    }
}

// Labels leaves alternately in left-to-right order.
fn to_tree(nodes: &[Proto], id: usize, next_label: &mut u8) -> Tree {
    match &nodes[id] {
        Proto::Leaf { .. } => {
            let label = *next_label;
            *next_label ^= 1;
            Tree::leaf(label)
        }
        Proto::Branch { feature, left, right } => {
            let l = to_tree(nodes, *left, next_label);
            let r = to_tree(nodes, *right, next_label);
            Tree::branch(*feature, l, r)
        }
    }
}

/// Axis-aligned box `(lo, hi]` per raw column for each truth leaf, in
/// left-to-right order, paired with the leaf label.
fn leaf_boxes(t: &Tree, predicates: &[Predicate], bounds: (f64, f64), p: usize) -> Vec<(Vec<(f64, f64)>, u8)> {
    fn walk(t: &Tree, predicates: &[Predicate], bx: Vec<(f64, f64)>, out: &mut Vec<(Vec<(f64, f64)>, u8)>) {
        match t {
            Tree::Leaf { label } => out.push((bx, *label)),
            Tree::Branch { feature, left, right } => {
                let Predicate::AtMost { column, threshold } = predicates[*feature] else {
                    unreachable!("synthetic features are numeric")
                };
                let mut lb = bx.clone();
                lb[column].0 = lb[column].0.max(threshold);
                walk(left, predicates, lb, out);
                let mut rb = bx;
                rb[column].1 = rb[column].1.min(threshold);
                walk(right, predicates, rb, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(t, predicates, vec![bounds; p], &mut out);
    out
}

fn sample_box(rng: &mut ChaCha8Rng, bx: &[(f64, f64)]) -> Vec<f64> {
    bx.iter()
        .map(|&(lo, hi)| loop {
            let x = hi - rng.random::<f64>() * (hi - lo);
            if x > lo {
                break x;
            }
        })
        .collect()
}

fn is_empty_box(bx: &[(f64, f64)]) -> bool {
    bx.iter().any(|&(lo, hi)| lo >= hi)
}

/// Predicates behind the features of `d`, by feature id.
fn feature_predicates(b: &Binarizer, d: &BinaryDataset) -> Vec<Predicate> {
    let all: Vec<(String, Predicate)> = b.predicate_names().into_iter().zip(b.predicates()).collect();
    d.feature_names()
        .iter()
        .map(|name| {
            all.iter()
                .find(|(n, _)| n == name)
                .map(|(_, p)| p.clone())
                .expect("feature produced by this binarizer")
        })
        .collect()
}

/// Random ground-truth tree benchmark.
///
/// Features are uniform on `[0, 1]`; the train copy gets uniform noise in
/// `[−f, f]` and is binarized at ten quantiles. The truth tree is grown on
/// the noisy binarized train set by repeatedly splitting a uniformly drawn
/// feasible (leaf, feature) pair, with leaves labeled alternately left to
/// right. Train labels come from the truth applied to the noise-free
/// features, then exactly `⌊c·n⌋` of them are flipped. The test set samples
/// `test_per_leaf` noise-free points inside each truth leaf's region.
pub fn gen_tree_dataset(cfg: &SyntheticTreeConfig) -> Result<SyntheticBundle> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let names = feature_names(cfg.p);
    let clean = uniform_matrix(&mut rng, cfg.n, cfg.p);
    let noisy = add_feature_noise(&mut rng, &clean, cfg.feature_noise);

    let noisy_raw = RawDataset::from_numeric(&names, &noisy, vec![0; cfg.n])?;
    let binarizer = binarize_fit(&noisy_raw, SYNTH_QUANTILES, 1)?;
    let noisy_bin = binarize_apply(&binarizer, &noisy_raw)?;

    let proto = grow_truth(&mut rng, &noisy_bin, cfg.depth, cfg.min_leaf);
    let infeasible = cfg.depth > 0 && proto.len() == 1;
    let mut first = u8::from(rng.random::<bool>());
    let truth = to_tree(&proto, 0, &mut first);

    let clean_raw = RawDataset::from_numeric(&names, &clean, vec![0; cfg.n])?;
    let clean_bin = binarize_apply_aligned(&binarizer, &clean_raw, &noisy_bin)?;
    let noise_seed = rng.random::<u64>();
    let labels = flip_class_noise(&truth.predict_dataset(&clean_bin)?, cfg.class_noise, noise_seed)?;
    let train = noisy_bin.with_labels(labels.clone())?;
    let train_raw = RawDataset::from_numeric(&names, &noisy, bits_to_labels(&labels))?;

    let predicates = feature_predicates(&binarizer, &noisy_bin);
    let f = cfg.feature_noise;
    let mut rows = Vec::new();
    let mut test_labels = Vec::new();
    let wide = leaf_boxes(&truth, &predicates, (-f, 1.0 + f), cfg.p);
    for (i, (bx, label)) in leaf_boxes(&truth, &predicates, (0.0, 1.0), cfg.p)
        .into_iter()
        .enumerate()
    {
        // a leaf whose region misses the unit cube is sampled over the
        // noisy feature range instead
        let bx = if is_empty_box(&bx) { wide[i].0.clone() } else { bx };
        if is_empty_box(&bx) {
            continue;
        }
        for _ in 0..cfg.test_per_leaf {
            rows.push(sample_box(&mut rng, &bx));
            test_labels.push(label);
        }
    }
    let test_raw = RawDataset::from_numeric(&names, &rows, test_labels)?;
    let test = binarize_apply_aligned(&binarizer, &test_raw, &noisy_bin)?;

    Ok(SyntheticBundle {
        train,
        test,
        truth_features: truth.split_features(),
        truth,
        infeasible,
        binarizer,
        train_raw,
        test_raw,
    })
}

#[derive(Debug, Clone)]
pub struct LinearBundle {
    pub train: BinaryDataset,
    pub test: BinaryDataset,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub binarizer: Binarizer,
    pub train_raw: RawDataset,
    pub test_raw: RawDataset,
}

/// Random linear separator benchmark. Weights are standard normal and the
/// bias is the lower median of `w·x` over the noise-free train features, so
/// the classes are balanced before class noise.
pub fn gen_linear_dataset(n: usize, p: usize, f: f64, c: f64, test_size: usize, seed: u64) -> Result<LinearBundle> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if p == 0 {
        return Err(Error::InvalidParameter("need at least one feature".into()));
    }
    if !(f >= 0.0 && f.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "feature noise {f} must be nonnegative"
        )));
    }
    if test_size == 0 {
        return Err(Error::InvalidParameter("test_size must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = feature_names(p);
    let weights: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
    let score = |row: &[f64]| row.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>();

    let clean = uniform_matrix(&mut rng, n, p);
    let noisy = add_feature_noise(&mut rng, &clean, f);
    let mut scores: Vec<f64> = clean.iter().map(|r| score(r)).collect();
    scores.sort_by(f64::total_cmp);
    let bias = scores[(n - 1) / 2];
    let label = |row: &[f64]| u8::from(score(row) > bias);

    let clean_labels: Vec<bool> = clean.iter().map(|r| label(r) == 1).collect();
    let labels = flip_class_noise(&Bitset::from_bools(&clean_labels), c, rng.random::<u64>())?;
    let train_raw = RawDataset::from_numeric(&names, &noisy, bits_to_labels(&labels))?;
    let binarizer = binarize_fit(&train_raw, SYNTH_QUANTILES, 1)?;
    let train = binarize_apply(&binarizer, &train_raw)?;

    let test_rows = uniform_matrix(&mut rng, test_size, p);
    let test_labels = test_rows.iter().map(|r| label(r)).collect();
    let test_raw = RawDataset::from_numeric(&names, &test_rows, test_labels)?;
    let test = binarize_apply_aligned(&binarizer, &test_raw, &train)?;
    Ok(LinearBundle {
        train,
        test,
        weights,
        bias,
        binarizer,
        train_raw,
        test_raw,
    })
}
