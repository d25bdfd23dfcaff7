//! Top-down induction with any objective as splitting criterion, weakest-link
//! cost-complexity pruning, and cross-validated choice of the pruning level.

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::data::{binarize_fit, stratified_kfold, Binarizer, BinaryDataset, RawDataset};
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::tree::Tree;
use crate::tuning::fold_count;

/// Depth used when growing without a depth limit.
pub const DEPTH_CAP: usize = 20;

/// Minimum improvement of the child sum over the parent for a split.
pub const SPLIT_TOLERANCE: f64 = 1e-12;

const ALPHA_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NumericMode {
    /// Quantile binarization shared with the optimal solver.
    #[default]
    BinaryFeatures,
    /// Every midpoint between consecutive distinct values.
    RawThresholds,
}

impl std::str::FromStr for NumericMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" | "binary-features" => Ok(NumericMode::BinaryFeatures),
            "raw" | "raw-thresholds" => Ok(NumericMode::RawThresholds),
            other => Err(Error::InvalidParameter(format!("unknown numeric mode `{other}`"))),
        }
    }
}

impl NumericMode {
    /// Fits the binarizer this mode uses on raw training data.
    pub fn fit_binarizer(self, raw: &RawDataset, quantile_count: usize, max_categories: usize) -> Result<Binarizer> {
        match self {
            NumericMode::BinaryFeatures => binarize_fit(raw, quantile_count, max_categories),
            NumericMode::RawThresholds => Binarizer::fit_exhaustive(raw, max_categories),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowConfig {
    pub objective: Objective,
    /// `None` grows up to [`DEPTH_CAP`].
    pub max_depth: Option<usize>,
    pub min_support: usize,
    pub numeric_mode: NumericMode,
}

impl GrowConfig {
    pub fn new(objective: Objective) -> Self {
        GrowConfig {
            objective,
            max_depth: None,
            min_support: 1,
            numeric_mode: NumericMode::BinaryFeatures,
        }
    }

    pub fn with_max_depth(mut self, depth: Option<usize>) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn with_min_support(mut self, min_support: usize) -> Self {
        self.min_support = min_support;
        self
    }

    pub fn effective_depth(&self) -> usize {
        self.max_depth.unwrap_or(DEPTH_CAP).min(DEPTH_CAP)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_support == 0 {
            return Err(Error::InvalidParameter("min_support must be >= 1".into()));
        }
        if let Some(d) = self.max_depth {
            if d > DEPTH_CAP {
                return Err(Error::InvalidParameter(format!(
                    "max_depth {d} exceeds the cap of {DEPTH_CAP}"
                )));
            }
        }
        self.objective.params.validate()
    }
}

/// Grows a tree top-down. At each node the split minimizing the summed
/// child values is taken if it improves on the node's own value; pure nodes
/// stay leaves. Ties go to the lowest feature id.
pub fn grow(d: &BinaryDataset, cfg: &GrowConfig) -> Result<Tree> {
    cfg.validate()?;
    if d.instance_count() == 0 {
        return Err(Error::EmptyData);
    }
    let all = Bitset::ones(d.instance_count());
    Ok(grow_node(d, cfg, &all, cfg.effective_depth()))
}

fn grow_node(d: &BinaryDataset, cfg: &GrowConfig, subset: &Bitset, depth_left: usize) -> Tree {
    let n = subset.count_ones();
    let subset_pos = subset.and(d.labels());
    let pos = subset_pos.count_ones();
    let leaf = Tree::leaf(u8::from(2 * pos > n));
    let ms = cfg.min_support;
    if depth_left == 0 || pos == 0 || pos == n || n < 2 * ms {
        return leaf;
    }
    let f = &cfg.objective;
    let value = |n: usize, p: usize| f.leaf_value(n, p.min(n - p));
    let parent = value(n, pos);
    let mut best: Option<(usize, f64)> = None;
    for (feature, bits) in d.features().iter().enumerate() {
        let nr = subset.intersection_count(bits);
        let nl = n - nr;
        if nl < ms || nr < ms {
            continue;
        }
        let pr = subset_pos.intersection_count(bits);
        let sum = value(nl, pos - pr) + value(nr, pr);
        if best.is_none_or(|(_, b)| sum < b) {
            best = Some((feature, sum));
        }
    }
    match best {
        Some((feature, sum)) if sum < parent - SPLIT_TOLERANCE => {
            let bits = d.feature(feature);
            let left = grow_node(d, cfg, &subset.and_not(bits), depth_left - 1);
            let right = grow_node(d, cfg, &subset.and(bits), depth_left - 1);
            Tree::branch(feature, left, right)
        }
        _ => leaf,
    }
}

/// Nested pruning sequence: `entries[i]` is optimal for penalties in
/// `[alpha_i, alpha_{i+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcpPath {
    pub entries: Vec<(f64, Tree)>,
}

impl CcpPath {
    pub fn alphas(&self) -> Vec<f64> {
        self.entries.iter().map(|(a, _)| *a).collect()
    }

    /// The subtree in force at penalty `alpha`.
    pub fn prune_at(&self, alpha: f64) -> &Tree {
        let i = self
            .entries
            .iter()
            .rposition(|(a, _)| *a <= alpha + ALPHA_TOLERANCE)
            .unwrap_or(0);
        &self.entries[i].1
    }
}

// Arena node for pruning; leaf errors and counts come from routing the data.
struct PruneNode {
    feature: usize,
    errors: usize,
    positives: usize,
    count: usize,
    children: Option<(usize, usize)>,
}

struct PruneTree {
    nodes: Vec<PruneNode>,
}

impl PruneTree {
    fn build(t: &Tree, d: &BinaryDataset) -> PruneTree {
        let mut nodes = Vec::new();
        Self::add(&mut nodes, t, d, &Bitset::ones(d.instance_count()));
        PruneTree { nodes }
    }

    fn add(nodes: &mut Vec<PruneNode>, t: &Tree, d: &BinaryDataset, subset: &Bitset) -> usize {
        let count = subset.count_ones();
        let positives = subset.intersection_count(d.labels());
        let id = nodes.len();
        nodes.push(PruneNode {
            feature: 0,
            errors: positives.min(count - positives),
            positives,
            count,
            children: None,
        });
        if let Tree::Branch { feature, left, right } = t {
            let bits = d.feature(*feature);
            let l = Self::add(nodes, left, d, &subset.and_not(bits));
            let r = Self::add(nodes, right, d, &subset.and(bits));
            nodes[id].feature = *feature;
            nodes[id].children = Some((l, r));
        }
        id
    }

    // (subtree errors, subtree leaves)
    fn subtree(&self, id: usize) -> (usize, usize) {
        match self.nodes[id].children {
            None => (self.nodes[id].errors, 1),
            Some((l, r)) => {
                let (el, ll) = self.subtree(l);
                let (er, lr) = self.subtree(r);
                (el + er, ll + lr)
            }
        }
    }

    // Weakest-link strength of every internal node, in preorder.
    fn links(&self, id: usize, total: f64, out: &mut Vec<(usize, f64)>) {
        if let Some((l, r)) = self.nodes[id].children {
            let (err, leaves) = self.subtree(id);
            let gain = (self.nodes[id].errors - err) as f64 / total;
            out.push((id, gain / (leaves - 1) as f64));
            self.links(l, total, out);
            self.links(r, total, out);
        }
    }

    /// Collapses internal nodes with strength ≤ `alpha` until none remain.
    fn collapse_up_to(&mut self, alpha: f64, total: f64) {
        loop {
            let mut links = Vec::new();
            self.links(0, total, &mut links);
            let weak: Vec<usize> = links
                .iter()
                .filter(|(_, g)| *g <= alpha + ALPHA_TOLERANCE)
                .map(|(id, _)| *id)
                .collect();
            if weak.is_empty() {
                return;
            }
            for id in weak {
                self.nodes[id].children = None;
            }
        }
    }

    fn to_tree(&self, id: usize) -> Tree {
        let node = &self.nodes[id];
        match node.children {
            None => Tree::leaf(u8::from(2 * node.positives > node.count)),
            Some((l, r)) => Tree::branch(node.feature, self.to_tree(l), self.to_tree(r)),
        }
    }
}

/// Weakest-link pruning path on training misclassification rate.
///
/// The first entry has alpha 0 and already drops splits that remove no
/// training errors; each later entry collapses every link of minimal
/// strength at once, so alphas are strictly increasing. Leaves are
/// relabeled by majority.
pub fn ccp_path(t: &Tree, d: &BinaryDataset) -> Result<CcpPath> {
    t.check_arity(d.feature_count())?;
    if d.instance_count() == 0 {
        return Err(Error::EmptyData);
    }
    let total = d.instance_count() as f64;
    let mut pt = PruneTree::build(t, d);
    pt.collapse_up_to(0.0, total);
    let mut entries = vec![(0.0, pt.to_tree(0))];
    loop {
        let mut links = Vec::new();
        pt.links(0, total, &mut links);
        let Some(alpha) = links.iter().map(|(_, g)| *g).min_by(f64::total_cmp) else {
            break;
        };
        pt.collapse_up_to(alpha, total);
        entries.push((alpha, pt.to_tree(0)));
    }
    Ok(CcpPath { entries })
}

/// Candidate penalties for cross-validation: 0, the geometric mean of each
/// pair of consecutive positive alphas, and the largest alpha.
pub fn ccp_midpoints(path: &CcpPath) -> Vec<f64> {
    let positive: Vec<f64> = path.alphas().into_iter().filter(|a| *a > 0.0).collect();
    let mut out = vec![0.0];
    out.extend(positive.windows(2).map(|w| (w[0] * w[1]).sqrt()));
    if let Some(&last) = positive.last() {
        out.push(last);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TunedGreedy {
    pub tree: Tree,
    pub alpha: f64,
    pub candidates: Vec<f64>,
    /// Mean validation accuracy per candidate.
    pub cv_accuracy: Vec<f64>,
}

/// Grows on all of `d`, cross-validates every midpoint penalty, and prunes
/// the full tree at the one with the best mean validation accuracy (ties go
/// to the larger penalty).
pub fn fit_tuned(d: &BinaryDataset, cfg: &GrowConfig, cv_seed: u64) -> Result<TunedGreedy> {
    let n = d.instance_count();
    let k = fold_count(n)?;
    let full = grow(d, cfg)?;
    let path = ccp_path(&full, d)?;
    let candidates = ccp_midpoints(&path);
    let folds = stratified_kfold(d, k, cv_seed)?;
    let mut sums = vec![0.0; candidates.len()];
    for fold in &folds {
        let train = d.subset(&fold.train)?;
        let validation = d.subset(&fold.validation)?;
        let fold_path = ccp_path(&grow(&train, cfg)?, &train)?;
        for (sum, &alpha) in sums.iter_mut().zip(&candidates) {
            *sum += crate::metrics::accuracy(fold_path.prune_at(alpha), &validation)?;
        }
    }
    let cv_accuracy: Vec<f64> = sums.iter().map(|s| s / folds.len() as f64).collect();
    let best = best_favoring_last(&cv_accuracy);
    let alpha = candidates[best];
    Ok(TunedGreedy {
        tree: path.prune_at(alpha).clone(),
        alpha,
        candidates,
        cv_accuracy,
    })
}

// Index of the maximum; ties go to the later (larger-penalty) entry.
fn best_favoring_last(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v >= values[best] - 1e-12 {
            best = i;
        }
    }
    best
}
