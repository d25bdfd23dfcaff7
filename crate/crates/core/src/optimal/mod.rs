//! Exact minimization of leaf-additive objectives by dynamic programming over
//! instance subsets.
//!
//! A subproblem is an instance subset together with a remaining depth and a
//! branching-node budget. The value of a subproblem is the better of making
//! it a leaf and, for every feature and every split of the remaining budget
//! between the two children, the sum of the optimal child values. Subsets are
//! memoized, so a subtree reached through different feature orders is solved
//! once.
//!
//! Among trees of equal cost (within [`COST_TOLERANCE`]) the solver prefers
//! fewer branching nodes, then the lexicographically smallest canonical text.

mod cache;
mod enumerate;

use std::cell::OnceCell;
use std::cmp::Ordering;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::data::BinaryDataset;
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::tree::Tree;

pub use enumerate::{count_trees, enumerate_trees};

use cache::{LeafCostTable, SubsetCache};

/// Absolute tolerance under which two objective values count as equal.
pub const COST_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveLimits {
    pub max_depth: usize,
    pub max_branching: usize,
}

impl SolveLimits {
    pub fn new(max_depth: usize, max_branching: usize) -> Result<Self> {
        let limits = SolveLimits {
            max_depth,
            max_branching,
        };
        limits.validate()?;
        Ok(limits)
    }

    /// Depth limit only; the budget is the complete tree of that depth.
    pub fn depth(max_depth: usize) -> Self {
        SolveLimits {
            max_depth,
            max_branching: full_budget(max_depth),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_depth > 30 {
            return Err(Error::InvalidParameter(format!(
                "max_depth {} is unsupported",
                self.max_depth
            )));
        }
        if self.max_branching > full_budget(self.max_depth) {
            return Err(Error::InvalidParameter(format!(
                "max_branching {} exceeds 2^{} - 1",
                self.max_branching, self.max_depth
            )));
        }
        Ok(())
    }
}

/// Branching nodes of the complete tree of depth `depth`.
#[inline]
pub fn full_budget(depth: usize) -> usize {
    if depth >= usize::BITS as usize - 1 {
        usize::MAX
    } else {
        (1usize << depth) - 1
    }
}

/// Soft and hard complexity controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalties {
    /// Cost per leaf, multiplied by the training-set size.
    pub lambda_cost: f64,
    /// Cost per instance passing through each branching node.
    pub omega_cost: f64,
    /// Hard minimum number of instances per leaf.
    pub min_support: usize,
}

impl Default for Penalties {
    fn default() -> Self {
        Penalties {
            lambda_cost: 0.0,
            omega_cost: 0.0,
            min_support: 1,
        }
    }
}

impl Penalties {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_cost >= 0.0 && self.lambda_cost.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be nonnegative, got {}",
                self.lambda_cost
            )));
        }
        if !(self.omega_cost >= 0.0 && self.omega_cost.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega must be nonnegative, got {}",
                self.omega_cost
            )));
        }
        if self.min_support == 0 {
            return Err(Error::InvalidParameter("min_support must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub subproblems: usize,
    pub hits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub tree: Tree,
    pub objective_value: f64,
    pub cache_stats: CacheStats,
}

// Leaf and branch costs are computed by these two functions everywhere, so
// the solver's reported value and `objective_of_tree` agree bit for bit.
#[inline]
pub(crate) fn branch_cost(omega: f64, n: usize, left: f64, right: f64) -> f64 {
    omega * n as f64 + left + right
}

#[inline]
pub(crate) fn leaf_cost(objective: &Objective, lambda_total: f64, n: usize, e: usize) -> f64 {
    objective.leaf_value(n, e) + lambda_total
}

/// Exact objective of `t` on `d`: leaf values plus `λ·|D|` per leaf plus
/// `ω·n` per branching node. A nonempty leaf below the minimum support makes
/// the tree infeasible, reported as `f64::INFINITY`.
pub fn objective_of_tree(t: &Tree, d: &BinaryDataset, objective: &Objective, pen: &Penalties) -> Result<f64> {
    t.check_arity(d.feature_count())?;
    pen.validate()?;
    let lambda_total = pen.lambda_cost * d.instance_count() as f64;
    Ok(eval_tree(
        t,
        d,
        objective,
        pen,
        lambda_total,
        &Bitset::ones(d.instance_count()),
    ))
}

fn eval_tree(
    t: &Tree,
    d: &BinaryDataset,
    objective: &Objective,
    pen: &Penalties,
    lambda_total: f64,
    subset: &Bitset,
) -> f64 {
    let n = subset.count_ones();
    match t {
        Tree::Leaf { .. } => {
            if n > 0 && n < pen.min_support {
                return f64::INFINITY;
            }
            let pos = subset.intersection_count(d.labels());
            leaf_cost(objective, lambda_total, n, pos.min(n - pos))
        }
        Tree::Branch { feature, left, right } => {
            let f = d.feature(*feature);
            let l = eval_tree(left, d, objective, pen, lambda_total, &subset.and_not(f));
            let r = eval_tree(right, d, objective, pen, lambda_total, &subset.and(f));
            branch_cost(pen.omega_cost, n, l, r)
        }
    }
}

/// Solves one problem from scratch.
pub fn solve(d: &BinaryDataset, objective: &Objective, limits: SolveLimits, pen: &Penalties) -> Result<Solution> {
    Solver::new(d, *objective, *pen)?.solve(limits)
}

// Solver-internal tree with shared subtrees. The canonical text is built
// on first use, which only happens when a tie has to be broken.
#[derive(Debug)]
struct Node {
    shape: Shape,
    canon: OnceCell<Box<str>>,
}

#[derive(Debug)]
enum Shape {
    Leaf(u8),
    Branch(usize, Rc<Node>, Rc<Node>),
}

impl Node {
    fn leaf(label: u8) -> Rc<Node> {
        Rc::new(Node {
            shape: Shape::Leaf(label),
            canon: OnceCell::new(),
        })
    }

    fn branch(feature: usize, left: Rc<Node>, right: Rc<Node>) -> Rc<Node> {
        Rc::new(Node {
            shape: Shape::Branch(feature, left, right),
            canon: OnceCell::new(),
        })
    }

    fn to_tree(&self) -> Tree {
        match &self.shape {
            Shape::Leaf(label) => Tree::leaf(*label),
            Shape::Branch(f, l, r) => Tree::branch(*f, l.to_tree(), r.to_tree()),
        }
    }

    fn canonical(&self) -> &str {
        self.canon.get_or_init(|| match &self.shape {
            Shape::Leaf(label) => format!("L{label}").into(),
            Shape::Branch(f, l, r) => format!("B{f}({},{})", l.canonical(), r.canonical()).into(),
        })
    }
}

#[derive(Debug, Clone)]
struct Best {
    cost: f64,
    nodes: usize,
    tree: Rc<Node>,
}

/// Optimal values for budgets `0..len`; `None` marks an infeasible budget.
type BudgetTable = Vec<Option<Best>>;

/// Memoizing solver bound to one dataset, objective and penalty setting.
///
/// The cache survives across [`Solver::solve`] calls, so sweeping depth or
/// budget limits on the same data reuses every subproblem already solved.
pub struct Solver<'a> {
    data: &'a BinaryDataset,
    objective: Objective,
    penalties: Penalties,
    lambda_total: f64,
    depth2_specialized: bool,
    cache: SubsetCache<Vec<Option<BudgetTable>>>,
    leaf_costs: LeafCostTable,
    stats: CacheStats,
    leaves: [Rc<Node>; 2],
    /// `B{f}(` per feature, for tie-breaking on canonical text.
    prefixes: Vec<Box<str>>,
    /// Feature ids sorted by prefix bytes.
    prefix_order: Vec<usize>,
    pair_counts: Vec<(u32, u32)>,
}

impl<'a> Solver<'a> {
    pub fn new(data: &'a BinaryDataset, objective: Objective, penalties: Penalties) -> Result<Self> {
        objective.params.validate()?;
        penalties.validate()?;
        let prefixes: Vec<Box<str>> = (0..data.feature_count()).map(|f| format!("B{f}(").into()).collect();
        let mut prefix_order: Vec<usize> = (0..data.feature_count()).collect();
        prefix_order.sort_by(|&a, &b| prefixes[a].cmp(&prefixes[b]));
        Ok(Solver {
            data,
            objective,
            penalties,
            lambda_total: penalties.lambda_cost * data.instance_count() as f64,
            depth2_specialized: true,
            cache: SubsetCache::default(),
            leaf_costs: LeafCostTable::new(data.instance_count()),
            stats: CacheStats::default(),
            leaves: [Node::leaf(0), Node::leaf(1)],
            prefixes,
            prefix_order,
            pair_counts: Vec::new(),
        })
    }

    /// Toggles the pairwise-count routine for depth-two subproblems.
    pub fn with_depth2_specialized(mut self, on: bool) -> Self {
        self.depth2_specialized = on;
        self
    }

    pub fn cache_stats(&self) -> CacheStats {
        self.stats
    }

    pub fn solve(&mut self, limits: SolveLimits) -> Result<Solution> {
        limits.validate()?;
        let n = self.data.instance_count();
        if self.penalties.min_support > n {
            return Err(Error::Infeasible(format!(
                "min_support {} exceeds the {n} instances",
                self.penalties.min_support
            )));
        }
        let all = Bitset::ones(n);
        let pos = self.data.positives();
        let best = if limits.max_depth == 0 || limits.max_branching == 0 {
            self.leaf_best(n, pos)
        } else {
            let table = self.subproblem(&all, n, pos, limits.max_depth, limits.max_branching);
            let b = limits.max_branching.min(table.len() - 1);
            table[b].clone()
        };
        let best = best.ok_or_else(|| Error::Infeasible("no tree satisfies the limits".into()))?;
        Ok(Solution {
            tree: best.tree.to_tree(),
            objective_value: best.cost,
            cache_stats: self.stats,
        })
    }

    fn leaf_best(&mut self, n: usize, pos: usize) -> Option<Best> {
        if n < self.penalties.min_support {
            return None;
        }
        let cost = self.leaf_cost(n, pos);
        Some(Best {
            cost,
            nodes: 0,
            tree: self.leaves[usize::from(2 * pos > n)].clone(),
        })
    }

    /// Budget table for `subset` at remaining `depth ≥ 1`, covering budgets
    /// `0..=min(bmax, 2^depth − 1)`.
    fn subproblem(&mut self, subset: &Bitset, n: usize, pos: usize, depth: usize, bmax: usize) -> BudgetTable {
        debug_assert!(depth >= 1);
        let bmax = bmax.min(full_budget(depth));
        if let Some(tables) = self.cache.get(subset) {
            if let Some(Some(table)) = tables.get(depth) {
                if table.len() > bmax {
                    self.stats.hits += 1;
                    return table[..=bmax].to_vec();
                }
            }
        }
        self.stats.subproblems += 1;

        let table = if bmax == 0 || n < 2 * self.penalties.min_support || self.leaf_unbeatable(n, pos) {
            vec![self.leaf_best(n, pos); bmax + 1]
        } else if depth == 1 {
            self.depth_one(subset, n, pos)
        } else if depth == 2 && self.depth2_specialized {
            self.depth_two(subset, n, pos, bmax)
        } else {
            self.general(subset, n, pos, depth, bmax)
        };

        let tables = self.cache.get_or_insert_with(subset, Vec::new);
        if tables.len() <= depth {
            tables.resize(depth + 1, None);
        }
        tables[depth] = Some(table.clone());
        table
    }

    fn general(&mut self, subset: &Bitset, n: usize, pos: usize, depth: usize, bmax: usize) -> BudgetTable {
        let data = self.data;
        let ms = self.penalties.min_support;
        let child_bmax = (bmax - 1).min(full_budget(depth - 1));
        let subset_pos = subset.and(data.labels());
        let mut table: BudgetTable = vec![self.leaf_best(n, pos); bmax + 1];
        for (f, _) in self.splitting_features(subset, n) {
            let feature = data.feature(f);
            let nr = subset.intersection_count(feature);
            let nl = n - nr;
            if nl < ms || nr < ms {
                continue;
            }
            let pr = subset_pos.intersection_count(feature);
            let pl = pos - pr;
            let (left, right) = if child_bmax == 0 {
                (vec![self.leaf_best(nl, pl)], vec![self.leaf_best(nr, pr)])
            } else {
                let left_set = subset.and_not(feature);
                let right_set = subset.and(feature);
                (
                    self.subproblem(&left_set, nl, pl, depth - 1, child_bmax),
                    self.subproblem(&right_set, nr, pr, depth - 1, child_bmax),
                )
            };
            self.assemble(f, n, &left, &right, &mut table);
        }
        table
    }

    fn depth_one(&mut self, subset: &Bitset, n: usize, pos: usize) -> BudgetTable {
        let data = self.data;
        let subset_pos = subset.and(data.labels());
        let counts: Vec<(usize, usize, usize)> = self
            .splitting_features(subset, n)
            .into_iter()
            .map(|(f, right)| (f, right.count_ones(), subset_pos.intersection_count(&right)))
            .collect();
        self.depth_one_from_counts(n, pos, counts.into_iter())
    }

    /// `[leaf, best with ≤ 1 branching node]` from
    /// `(feature, instances, positives)` counts on the right side, in
    /// increasing feature order.
    ///
    /// Works on plain costs and builds a single tree at the end. Candidates
    /// are visited in feature order with the same preference test as
    /// [`Solver::assemble`]; for two stumps the canonical text comparison
    /// reduces to comparing `(prefix of the feature, left label, right label)`.
    fn depth_one_from_counts(
        &mut self,
        n: usize,
        pos: usize,
        counts: impl Iterator<Item = (usize, usize, usize)>,
    ) -> BudgetTable {
        let ms = self.penalties.min_support;
        let omega = self.penalties.omega_cost;
        let leaf = self.leaf_best(n, pos);
        let mut table: BudgetTable = vec![leaf.clone(), leaf];
        if n < 2 * ms {
            return table;
        }
        // (cost, feature, left label, right label) of the best stump so far
        let mut best: Option<(f64, usize, u8, u8)> = None;
        let mut cur_cost = table[1].as_ref().map(|b| b.cost);
        for (f, nr, pr) in counts {
            let nl = n - nr;
            if nl < ms || nr < ms {
                continue;
            }
            let pl = pos - pr;
            let lc = self.leaf_cost(nl, pl);
            let rc = self.leaf_cost(nr, pr);
            let cost = branch_cost(omega, n, lc, rc);
            let labels = (u8::from(2 * pl > nl), u8::from(2 * pr > nr));
            let better = match (cur_cost, best) {
                (None, _) => true,
                (Some(c), _) if cost < c - COST_TOLERANCE => true,
                (Some(c), _) if cost > c + COST_TOLERANCE => false,
                // the current best is the leaf, which has fewer nodes
                (Some(_), None) => false,
                (Some(_), Some((_, bf, bl, br))) => {
                    (self.prefixes[f].as_bytes(), labels.0, labels.1) < (self.prefixes[bf].as_bytes(), bl, br)
                }
            };
            if better {
                best = Some((cost, f, labels.0, labels.1));
                cur_cost = Some(cost);
            }
        }
        if let Some((cost, f, l, r)) = best {
            table[1] = Some(Best {
                cost,
                nodes: 1,
                tree: Node::branch(
                    f,
                    self.leaves[usize::from(l)].clone(),
                    self.leaves[usize::from(r)].clone(),
                ),
            });
        }
        table
    }

    /// True when no branching subtree can beat a leaf on `n` instances.
    ///
    /// Leaf values are nonnegative, so any branch costs at least `ω·n`
    /// plus the per-leaf penalty of two leaves. The floor is summed in the
    /// same order as [`branch_cost`] and compared without tolerance, so a
    /// pruned branch would never have been preferred over the leaf.
    fn leaf_unbeatable(&mut self, n: usize, pos: usize) -> bool {
        let floor = branch_cost(self.penalties.omega_cost, n, self.lambda_total, self.lambda_total);
        floor > 0.0 && self.leaf_cost(n, pos) <= floor
    }

    #[inline]
    fn leaf_cost(&mut self, n: usize, pos: usize) -> f64 {
        let e = pos.min(n - pos);
        self.leaf_costs
            .get(n, e, |n, e| leaf_cost(&self.objective, self.lambda_total, n, e))
    }

    /// Features that split `subset` into two nonempty parts, one per
    /// distinct partition, with the right-hand part of each. Of features
    /// inducing the same partition only the one with the smallest prefix is
    /// kept: it yields the same costs and wins every tie on canonical text.
    /// Returned in increasing feature order.
    fn splitting_features(&self, subset: &Bitset, n: usize) -> Vec<(usize, Bitset)> {
        let mut out: Vec<(usize, usize, Bitset)> = Vec::new();
        for &f in &self.prefix_order {
            let right = subset.and(self.data.feature(f));
            let c = right.count_ones();
            if c == 0 || c == n || out.iter().any(|(_, oc, o)| *oc == c && *o == right) {
                continue;
            }
            out.push((f, c, right));
        }
        out.sort_unstable_by_key(|(f, _, _)| *f);
        out.into_iter().map(|(f, _, right)| (f, right)).collect()
    }

    /// Depth-two subproblems from pairwise feature co-occurrence counts,
    /// without materializing or caching the depth-one children.
    fn depth_two(&mut self, subset: &Bitset, n: usize, pos: usize, bmax: usize) -> BudgetTable {
        let data = self.data;
        let ms = self.penalties.min_support;
        let subset_pos = subset.and(data.labels());
        let feats = self.splitting_features(subset, n);
        let p = feats.len();

        // pair_counts[i·p + j] = (|S ∧ Fi ∧ Fj|, |S ∧ Y ∧ Fi ∧ Fj|) over the
        // kept features, symmetric
        let mut pairs = std::mem::take(&mut self.pair_counts);
        pairs.clear();
        pairs.resize(p * p, (0, 0));
        for (i, (_, si)) in feats.iter().enumerate() {
            let syi = subset_pos.and(si);
            pairs[i * p + i] = (si.count_ones() as u32, syi.count_ones() as u32);
            for (j, (_, sj)) in feats.iter().enumerate().skip(i + 1) {
                let c = (si.intersection_count(sj) as u32, syi.intersection_count(sj) as u32);
                pairs[i * p + j] = c;
                pairs[j * p + i] = c;
            }
        }

        let child_bmax = (bmax - 1).min(1);
        let mut table: BudgetTable = vec![self.leaf_best(n, pos); bmax + 1];
        let mut right_counts = Vec::with_capacity(p);
        let mut left_counts = Vec::with_capacity(p);
        for (i, &(a, _)) in feats.iter().enumerate() {
            let (nr, pr) = pairs[i * p + i];
            let (nr, pr) = (nr as usize, pr as usize);
            let nl = n - nr;
            if nl < ms || nr < ms {
                continue;
            }
            let pl = pos - pr;
            let (left, right) = if child_bmax == 0 {
                (vec![self.leaf_best(nl, pl)], vec![self.leaf_best(nr, pr)])
            } else {
                right_counts.clear();
                left_counts.clear();
                for (j, &(b, _)) in feats.iter().enumerate() {
                    let (c, cp) = pairs[i * p + j];
                    let (tot, totp) = pairs[j * p + j];
                    right_counts.push((b, c as usize, cp as usize));
                    left_counts.push((b, (tot - c) as usize, (totp - cp) as usize));
                }
                let right = if self.leaf_unbeatable(nr, pr) {
                    vec![self.leaf_best(nr, pr); 2]
                } else {
                    self.depth_one_from_counts(nr, pr, right_counts.iter().copied())
                };
                let left = if self.leaf_unbeatable(nl, pl) {
                    vec![self.leaf_best(nl, pl); 2]
                } else {
                    self.depth_one_from_counts(nl, pl, left_counts.iter().copied())
                };
                (left, right)
            };
            self.assemble(a, n, &left, &right, &mut table);
        }
        self.pair_counts = pairs;
        table
    }

    /// Folds every budget split of a branch on `feature` into `table`.
    fn assemble(
        &mut self,
        feature: usize,
        n: usize,
        left: &[Option<Best>],
        right: &[Option<Best>],
        table: &mut BudgetTable,
    ) {
        let omega = self.penalties.omega_cost;
        for (b, slot) in table.iter_mut().enumerate().skip(1) {
            for l in 0..b {
                let r = b - 1 - l;
                let (Some(Some(lb)), Some(Some(rb))) = (left.get(l), right.get(r)) else {
                    continue;
                };
                let cost = branch_cost(omega, n, lb.cost, rb.cost);
                let nodes = 1 + lb.nodes + rb.nodes;
                let better = match slot {
                    None => true,
                    Some(cur) => self.prefer(cost, nodes, feature, lb, rb, cur),
                };
                if better {
                    *slot = Some(Best {
                        cost,
                        nodes,
                        tree: Node::branch(feature, lb.tree.clone(), rb.tree.clone()),
                    });
                }
            }
        }
    }

    // Strictly better than `cur` under (cost, nodes, canonical text).
    fn prefer(&mut self, cost: f64, nodes: usize, feature: usize, lb: &Best, rb: &Best, cur: &Best) -> bool {
        if cost < cur.cost - COST_TOLERANCE {
            return true;
        }
        if cost > cur.cost + COST_TOLERANCE {
            return false;
        }
        match nodes.cmp(&cur.nodes) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
        let candidate = self.prefixes[feature]
            .bytes()
            .chain(lb.tree.canonical().bytes())
            .chain(std::iter::once(b','))
            .chain(rb.tree.canonical().bytes())
            .chain(std::iter::once(b')'));
        candidate.lt(cur.tree.canonical().bytes())
    }
}
