//! Exhaustive enumeration of small trees, used as an optimality oracle.

use super::SolveLimits;
use crate::data::BinaryDataset;
use crate::error::{Error, Result};
use crate::tree::Tree;

pub const ENUMERATION_MAX_FEATURES: usize = 10;
pub const ENUMERATION_MAX_DEPTH: usize = 3;

/// Every structurally distinct tree over the features of `d` within the
/// limits. Leaves carry label 0; objectives ignore stored labels.
pub fn enumerate_trees(d: &BinaryDataset, limits: SolveLimits) -> Result<Vec<Tree>> {
    limits.validate()?;
    let p = d.feature_count();
    if p > ENUMERATION_MAX_FEATURES || limits.max_depth > ENUMERATION_MAX_DEPTH {
        return Err(Error::GuardExceeded(format!(
            "enumeration needs at most {ENUMERATION_MAX_FEATURES} features and depth {ENUMERATION_MAX_DEPTH}, got {p} features and depth {}",
            limits.max_depth
        )));
    }
    let mut out = Vec::new();
    for k in 0..=limits.max_branching {
        out.extend(exact(p, limits.max_depth, k));
    }
    Ok(out)
}

/// Number of trees `enumerate_trees` yields for `feature_count` features.
pub fn count_trees(feature_count: usize, limits: SolveLimits) -> u128 {
    (0..=limits.max_branching)
        .map(|k| exact_count(feature_count, limits.max_depth, k))
        .sum()
}

// Trees of depth ≤ `depth` with exactly `k` branching nodes.
fn exact(p: usize, depth: usize, k: usize) -> Vec<Tree> {
    if k == 0 {
        return vec![Tree::leaf(0)];
    }
    if depth == 0 || k > super::full_budget(depth) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for l in 0..k {
        let lefts = exact(p, depth - 1, l);
        let rights = exact(p, depth - 1, k - 1 - l);
        for f in 0..p {
            for left in &lefts {
                for right in &rights {
                    out.push(Tree::branch(f, left.clone(), right.clone()));
                }
            }
        }
    }
    out
}

fn exact_count(p: usize, depth: usize, k: usize) -> u128 {
    if k == 0 {
        return 1;
    }
    if depth == 0 || k > super::full_budget(depth) {
        return 0;
    }
    (0..k)
        .map(|l| p as u128 * exact_count(p, depth - 1, l) * exact_count(p, depth - 1, k - 1 - l))
        .sum()
}
