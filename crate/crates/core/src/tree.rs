//! Binary classification trees over binary features.
//!
//! A branch routes an instance right when its feature bit is 1 and left when
//! it is 0. The canonical text form is a preorder walk, `L<label>` for leaves
//! and `B<feature>(<left>,<right>)` for branches.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::data::BinaryDataset;
use crate::error::{Error, Result};
use crate::objectives::LeafStats;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tree {
    Leaf {
        label: u8,
    },
    Branch {
        feature: usize,
        left: Box<Tree>,
        right: Box<Tree>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeMetrics {
    pub leaves: usize,
    pub branching_nodes: usize,
    pub depth: usize,
    /// Mean number of branching nodes on an instance's root-to-leaf path.
    pub question_length: f64,
}

impl Tree {
    pub fn leaf(label: u8) -> Tree {
        Tree::Leaf { label }
    }

    pub fn branch(feature: usize, left: Tree, right: Tree) -> Tree {
        Tree::Branch {
            feature,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf { .. })
    }

    pub fn depth(&self) -> usize {
        match self {
            Tree::Leaf { .. } => 0,
            Tree::Branch { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn branching_count(&self) -> usize {
        match self {
            Tree::Leaf { .. } => 0,
            Tree::Branch { left, right, .. } => 1 + left.branching_count() + right.branching_count(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.branching_count() + 1
    }

    /// Distinct feature ids used by branching nodes.
    pub fn split_features(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_features(&mut out);
        out
    }

    fn collect_features(&self, out: &mut BTreeSet<usize>) {
        if let Tree::Branch { feature, left, right } = self {
            out.insert(*feature);
            left.collect_features(out);
            right.collect_features(out);
        }
    }

    pub fn max_feature(&self) -> Option<usize> {
        self.split_features().last().copied()
    }

    pub fn check_arity(&self, feature_count: usize) -> Result<()> {
        match self.max_feature() {
            Some(f) if f >= feature_count => Err(Error::FeatureOutOfRange {
                feature: f,
                feature_count,
            }),
            _ => Ok(()),
        }
    }

    pub fn predict(&self, instance: &[bool]) -> Result<u8> {
        let mut node = self;
        loop {
            match node {
                Tree::Leaf { label } => return Ok(*label),
                Tree::Branch { feature, left, right } => {
                    let bit = instance.get(*feature).ok_or(Error::FeatureOutOfRange {
                        feature: *feature,
                        feature_count: instance.len(),
                    })?;
                    node = if *bit { right } else { left };
                }
            }
        }
    }

    /// Predictions for every instance of `d`, as a bitset of predicted
    /// positives.
    pub fn predict_dataset(&self, d: &BinaryDataset) -> Result<Bitset> {
        self.check_arity(d.feature_count())?;
        let mut out = Bitset::zeros(d.instance_count());
        for (label, subset, _) in self.route(d) {
            if label == 1 {
                for i in subset.iter_ones() {
                    out.insert(i);
                }
            }
        }
        Ok(out)
    }

    /// Every leaf in left-to-right order as (stored label, instances reaching
    /// it, depth). Arity must already be checked.
    pub(crate) fn route(&self, d: &BinaryDataset) -> Vec<(u8, Bitset, usize)> {
        let mut out = Vec::with_capacity(self.leaf_count());
        self.route_into(d, Bitset::ones(d.instance_count()), 0, &mut out);
        out
    }

    fn route_into(&self, d: &BinaryDataset, subset: Bitset, depth: usize, out: &mut Vec<(u8, Bitset, usize)>) {
        match self {
            Tree::Leaf { label } => out.push((*label, subset, depth)),
            Tree::Branch { feature, left, right } => {
                let f = d.feature(*feature);
                left.route_into(d, subset.and_not(f), depth + 1, out);
                right.route_into(d, subset.and(f), depth + 1, out);
            }
        }
    }

    /// `(n, e)` per leaf, left to right, with `e` counted under majority
    /// relabeling of each leaf (ties go to label 0).
    pub fn leaf_stats(&self, d: &BinaryDataset) -> Result<Vec<LeafStats>> {
        self.check_arity(d.feature_count())?;
        Ok(self
            .route(d)
            .into_iter()
            .map(|(_, subset, _)| {
                let n = subset.count_ones();
                LeafStats::from_counts(n, subset.intersection_count(d.labels()))
            })
            .collect())
    }

    /// Same structure with every leaf labeled by the majority of `d` (ties → 0).
    /// Leaves that `d` does not reach keep their label.
    pub fn relabel_majority(&self, d: &BinaryDataset) -> Result<Tree> {
        self.check_arity(d.feature_count())?;
        Ok(self.relabel_inner(d, &Bitset::ones(d.instance_count())))
    }

    fn relabel_inner(&self, d: &BinaryDataset, subset: &Bitset) -> Tree {
        match self {
            Tree::Leaf { label } => {
                let n = subset.count_ones();
                if n == 0 {
                    return Tree::leaf(*label);
                }
                let pos = subset.intersection_count(d.labels());
                Tree::leaf(u8::from(2 * pos > n))
            }
            Tree::Branch { feature, left, right } => {
                let f = d.feature(*feature);
                Tree::branch(
                    *feature,
                    left.relabel_inner(d, &subset.and_not(f)),
                    right.relabel_inner(d, &subset.and(f)),
                )
            }
        }
    }

    pub fn metrics(&self, d: &BinaryDataset) -> Result<TreeMetrics> {
        tree_metrics(self, d)
    }

    /// Canonical preorder text form.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        self.write_canonical(&mut s);
        s
    }

    pub(crate) fn write_canonical(&self, out: &mut String) {
        use std::fmt::Write;
        match self {
            Tree::Leaf { label } => {
                let _ = write!(out, "L{label}");
            }
            Tree::Branch { feature, left, right } => {
                let _ = write!(out, "B{feature}(");
                left.write_canonical(out);
                out.push(',');
                right.write_canonical(out);
                out.push(')');
            }
        }
    }

    pub fn deserialize(text: &str) -> Result<Tree> {
        let mut parser = Parser {
            bytes: text.as_bytes(),
            pos: 0,
        };
        let tree = parser.tree()?;
        if parser.pos != parser.bytes.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(tree)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trees always serialize")
    }

    pub fn from_json(text: &str) -> Result<Tree> {
        serde_json::from_str(text).map_err(|e| Error::MalformedTree {
            offset: e.column(),
            reason: e.to_string(),
        })
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

pub fn predict(t: &Tree, instance: &[bool]) -> Result<u8> {
    t.predict(instance)
}

pub fn leaf_stats(t: &Tree, d: &BinaryDataset) -> Result<Vec<LeafStats>> {
    t.leaf_stats(d)
}

pub fn tree_metrics(t: &Tree, d: &BinaryDataset) -> Result<TreeMetrics> {
    t.check_arity(d.feature_count())?;
    let path_total: usize = t
        .route(d)
        .iter()
        .map(|(_, subset, depth)| subset.count_ones() * depth)
        .sum();
    Ok(TreeMetrics {
        leaves: t.leaf_count(),
        branching_nodes: t.branching_count(),
        depth: t.depth(),
        question_length: path_total as f64 / d.instance_count() as f64,
    })
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, reason: &str) -> Error {
        Error::MalformedTree {
            offset: self.pos,
            reason: reason.to_string(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.bytes.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", byte as char)))
        }
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let digits = &self.bytes[start..self.pos];
        if digits.is_empty() {
            return Err(self.error("expected digits"));
        }
        // canonical form has no leading zeros
        if digits.len() > 1 && digits[0] == b'0' {
            return Err(Error::MalformedTree {
                offset: start,
                reason: "leading zero".into(),
            });
        }
        std::str::from_utf8(digits)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("number out of range"))
    }

    fn tree(&mut self) -> Result<Tree> {
        match self.bytes.get(self.pos) {
            Some(b'L') => {
                self.pos += 1;
                let label = self.number()?;
                if label > 1 {
                    return Err(self.error("leaf label must be 0 or 1"));
                }
                Ok(Tree::leaf(label as u8))
            }
            Some(b'B') => {
                self.pos += 1;
                let feature = self.number()?;
                self.expect(b'(')?;
                let left = self.tree()?;
                self.expect(b',')?;
                let right = self.tree()?;
                self.expect(b')')?;
                Ok(Tree::branch(feature, left, right))
            }
            _ => Err(self.error("expected `L` or `B`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_tree() -> Tree {
        Tree::branch(
            0,
            Tree::branch(1, Tree::leaf(0), Tree::leaf(1)),
            Tree::branch(1, Tree::leaf(1), Tree::leaf(0)),
        )
    }

    #[test]
    fn predict_basics() {
        assert_eq!(Tree::leaf(1).predict(&[false, true]).unwrap(), 1);
        let stump = Tree::branch(0, Tree::leaf(0), Tree::leaf(1));
        assert_eq!(stump.predict(&[true]).unwrap(), 1);
        assert_eq!(stump.predict(&[false]).unwrap(), 0);
        assert!(matches!(stump.predict(&[]), Err(Error::FeatureOutOfRange { .. })));
    }

    #[test]
    fn xor_truth_table() {
        let t = xor_tree();
        for a in [false, true] {
            for b in [false, true] {
                assert_eq!(t.predict(&[a, b]).unwrap(), u8::from(a ^ b));
            }
        }
    }

    #[test]
    fn leaf_stats_cases() {
        let labels: Vec<bool> = (0..10).map(|i| i < 6).collect();
        let rows: Vec<Vec<bool>> = (0..10).map(|i| vec![i < 6, false]).collect();
        let d = BinaryDataset::from_rows(&rows, &labels).unwrap();
        assert_eq!(Tree::leaf(0).leaf_stats(&d).unwrap(), vec![LeafStats { n: 10, e: 4 }]);
        let stump = Tree::branch(0, Tree::leaf(0), Tree::leaf(1));
        assert_eq!(
            stump.leaf_stats(&d).unwrap(),
            vec![LeafStats { n: 4, e: 0 }, LeafStats { n: 6, e: 0 }]
        );
        // feature 1 is all zeros: nothing reaches the right leaf
        let empty = Tree::branch(1, Tree::leaf(0), Tree::leaf(1));
        assert_eq!(
            empty.leaf_stats(&d).unwrap(),
            vec![LeafStats { n: 10, e: 4 }, LeafStats { n: 0, e: 0 }]
        );
        assert!(Tree::branch(5, Tree::leaf(0), Tree::leaf(1)).leaf_stats(&d).is_err());
    }

    #[test]
    fn question_length_cases() {
        let rows: Vec<Vec<bool>> = (0..10).map(|i| vec![i < 3, i % 2 == 0]).collect();
        let labels: Vec<bool> = (0..10).map(|i| i % 3 == 0).collect();
        let d = BinaryDataset::from_rows(&rows, &labels).unwrap();
        assert_eq!(tree_metrics(&Tree::leaf(0), &d).unwrap().question_length, 0.0);
        let full = xor_tree();
        let m = tree_metrics(&full, &d).unwrap();
        assert_eq!(m.question_length, 2.0);
        assert_eq!((m.leaves, m.branching_nodes, m.depth), (4, 3, 2));
        // 30% of instances take the deeper right side: 0.7·1 + 0.3·2
        let lopsided = Tree::branch(0, Tree::leaf(0), Tree::branch(1, Tree::leaf(0), Tree::leaf(1)));
        let ql = tree_metrics(&lopsided, &d).unwrap().question_length;
        assert!((ql - 1.3).abs() < 1e-12);
    }

    #[test]
    fn canonical_text() {
        assert_eq!(Tree::leaf(1).serialize(), "L1");
        assert_eq!(Tree::deserialize("L1").unwrap(), Tree::leaf(1));
        let t = Tree::branch(3, Tree::leaf(0), Tree::leaf(1));
        assert_eq!(t.serialize(), "B3(L0,L1)");
        assert_eq!(Tree::deserialize("B3(L0,L1)").unwrap(), t);
        assert_eq!(xor_tree().serialize(), "B0(B1(L0,L1),B1(L1,L0))");
    }

    #[test]
    fn malformed_text_rejected() {
        for bad in [
            "",
            "L",
            "L2",
            "B(L0,L1)",
            "B1(L0,L1",
            "B1(L0;L1)",
            "L0x",
            "B01(L0,L1)",
            "X",
        ] {
            assert!(Tree::deserialize(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn json_form() {
        let t = Tree::branch(2, Tree::leaf(0), Tree::leaf(1));
        let json = t.to_json();
        assert_eq!(json, r#"{"feature":2,"left":{"label":0},"right":{"label":1}}"#);
        assert_eq!(Tree::from_json(&json).unwrap(), t);
        assert!(Tree::from_json("{\"nope\":1}").is_err());
    }

    #[test]
    fn relabel_uses_majority_with_ties_to_zero() {
        let rows = vec![vec![false], vec![false], vec![true], vec![true]];
        let labels = vec![true, false, true, true];
        let d = BinaryDataset::from_rows(&rows, &labels).unwrap();
        let t = Tree::branch(0, Tree::leaf(1), Tree::leaf(0))
            .relabel_majority(&d)
            .unwrap();
        assert_eq!(t, Tree::branch(0, Tree::leaf(0), Tree::leaf(1)));
    }
}
