//! Hyperparameter grids and cross-validated tuning of the optimal solver.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{stratified_kfold, BinaryDataset};
use crate::error::{Error, Result};
use crate::metrics::accuracy;
use crate::objectives::{Objective, ObjectiveKind};
use crate::optimal::{full_budget, Penalties, Solution, SolveLimits, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TuneMethod {
    None,
    Depth,
    Size,
    ComplexityCost,
    MinSupport,
    QuestionLength,
    Smoothing,
}

impl TuneMethod {
    pub const ALL: [TuneMethod; 7] = [
        TuneMethod::None,
        TuneMethod::Depth,
        TuneMethod::Size,
        TuneMethod::ComplexityCost,
        TuneMethod::MinSupport,
        TuneMethod::QuestionLength,
        TuneMethod::Smoothing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TuneMethod::None => "none",
            TuneMethod::Depth => "depth",
            TuneMethod::Size => "size",
            TuneMethod::ComplexityCost => "cost",
            TuneMethod::MinSupport => "support",
            TuneMethod::QuestionLength => "qlen",
            TuneMethod::Smoothing => "smooth",
        }
    }

    /// Whether larger grid values constrain the tree more.
    fn larger_is_stricter(self) -> bool {
        !matches!(self, TuneMethod::Depth | TuneMethod::Size)
    }
}

impl fmt::Display for TuneMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TuneMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TuneMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownTuneMethod(s.to_string()))
    }
}

/// Grid of settings for one method, sorted ascending.
///
/// Depth and Size values are integers; MinSupport values are fractions of
/// the training-set size, turned into counts by [`support_count`] for each
/// fold; the rest are λ, ω or x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneGrid {
    pub method: TuneMethod,
    pub values: Vec<f64>,
    pub k_requested: usize,
}

/// CV fold count by training-set size, capped at `n`.
pub fn fold_count(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "cross-validation needs at least 2 instances, got {n}"
        )));
    }
    let k = if n <= 100 {
        20
    } else if n <= 250 {
        10
    } else {
        5
    };
    Ok(k.min(n))
}

/// Minimum leaf size for a support fraction on `n` instances.
pub fn support_count(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64).round() as usize).max(1)
}

/// `m` values equally spaced in log scale over `[lo, hi]`.
fn log_spaced(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..m)
                .map(|i| {
                    if i + 1 == m {
                        hi
                    } else {
                        (a + i as f64 * (b - a) / (m - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Drops values closer than `step` to the previously kept value. The upper
/// end is always kept, displacing a too-close predecessor.
fn enforce_min_step(values: Vec<f64>, step: f64) -> Vec<f64> {
    let mut kept: Vec<f64> = Vec::with_capacity(values.len());
    let last = values.len().saturating_sub(1);
    for (i, v) in values.into_iter().enumerate() {
        match kept.last() {
            Some(&prev) if v - prev < step => {
                if i == last {
                    while kept.len() > 1 && kept.last().is_some_and(|&p| v - p < step) {
                        kept.pop();
                    }
                    kept.push(v);
                }
            }
            _ => kept.push(v),
        }
    }
    kept
}

/// `m` log-spaced integers in `[1, hi]`, rounded half up and deduplicated;
/// all of `1..=hi` when `m` is at least that many.
fn log_spaced_ints(hi: usize, m: usize) -> Vec<usize> {
    if m >= hi {
        return (1..=hi).collect();
    }
    let mut v: Vec<usize> = log_spaced(1.0, hi as f64, m)
        .into_iter()
        .map(|x| (x + 0.5).floor() as usize)
        .collect();
    v.dedup();
    v
}

// Real grid with a zero setting: {0} ∪ (k−1 log-spaced values in [lo, hi]).
fn zero_plus_log(lo: f64, hi: f64, k: usize, step: Option<f64>) -> Vec<f64> {
    let mut out = vec![0.0];
    if hi <= lo {
        out.push(hi);
        return out;
    }
    let vals = log_spaced(lo, hi, k - 1);
    out.extend(match step {
        Some(s) => enforce_min_step(vals, s),
        None => vals,
    });
    out
}

pub fn make_grid(
    method: TuneMethod,
    k: usize,
    dataset_size: usize,
    majority_fraction: f64,
    max_depth: usize,
) -> Result<TuneGrid> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("grid size k must be >= 2, got {k}")));
    }
    if max_depth < 1 {
        return Err(Error::InvalidParameter("max_depth must be >= 1 for tuning".into()));
    }
    if dataset_size == 0 {
        return Err(Error::EmptyData);
    }
    if !(0.5..1.0).contains(&majority_fraction) {
        return Err(Error::InvalidParameter(format!(
            "majority fraction {majority_fraction} outside [0.5, 1)"
        )));
    }
    let n = dataset_size as f64;
    let depth = max_depth as f64;
    let values: Vec<f64> = match method {
        TuneMethod::None => vec![max_depth as f64],
        TuneMethod::Depth => {
            let mut v: Vec<usize> = if k > max_depth {
                (0..=max_depth).collect()
            } else {
                (0..k)
                    .map(|i| (i as f64 * depth / (k - 1) as f64 + 0.5).floor() as usize)
                    .collect()
            };
            v.dedup();
            v.into_iter().map(|x| x as f64).collect()
        }
        TuneMethod::Size => {
            let top = full_budget(max_depth);
            let mut v = vec![0];
            v.extend(log_spaced_ints(top, k - 1));
            v.into_iter().map(|x| x as f64).collect()
        }
        TuneMethod::ComplexityCost => {
            let lo = 1.0 / (n * depth);
            zero_plus_log(lo, 0.05, k, Some(lo))
        }
        TuneMethod::MinSupport => {
            let lo = 1.0 / n;
            let hi = 1.0 - majority_fraction;
            if hi <= lo {
                vec![lo]
            } else {
                enforce_min_step(log_spaced(lo, hi, k), lo)
            }
        }
        TuneMethod::QuestionLength => zero_plus_log(1.0 / (n * depth), 0.1, k, None),
        TuneMethod::Smoothing => zero_plus_log(1.0 / depth, 0.05 * n, k, Some(1.0 / depth)),
    };
    let mut values = values;
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(TuneGrid {
        method,
        values,
        k_requested: k,
    })
}

/// One cross-validation cell; `accuracy` is `None` when the setting was
/// infeasible on that fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub setting: usize,
    pub value: f64,
    pub fold: usize,
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub method: TuneMethod,
    pub grid: TuneGrid,
    /// Index into `grid.values`.
    pub chosen: usize,
    pub chosen_value: f64,
    pub solution: Solution,
    pub cv_table: Vec<CvRow>,
    /// Number of solver invocations, final retrain included.
    pub solver_calls: usize,
    /// Dynamic-programming subproblems solved over all invocations.
    pub subproblems: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneConfig {
    pub objective: Objective,
    pub method: TuneMethod,
    pub k: usize,
    pub max_depth: usize,
    /// Base penalties; the tuned parameter overrides its own field.
    pub penalties: Penalties,
    pub seed: u64,
}

// The solver setting a grid value stands for, on a training set of size `n`.
fn setting(cfg: &TuneConfig, value: f64, n: usize) -> Result<(Objective, Penalties, SolveLimits)> {
    let mut objective = cfg.objective;
    let mut pen = cfg.penalties;
    let mut limits = SolveLimits::depth(cfg.max_depth);
    match cfg.method {
        TuneMethod::None => {}
        TuneMethod::Depth => limits = SolveLimits::depth(value as usize),
        TuneMethod::Size => limits = SolveLimits::new(cfg.max_depth, value as usize)?,
        TuneMethod::ComplexityCost => pen.lambda_cost = value,
        TuneMethod::MinSupport => pen.min_support = support_count(value, n),
        TuneMethod::QuestionLength => pen.omega_cost = value,
        TuneMethod::Smoothing => {
            objective = Objective::new(
                ObjectiveKind::SmoothedAccuracy,
                cfg.objective.params.with_smoothing(value)?,
            )?;
        }
    }
    Ok((objective, pen, limits))
}

// Settings sharing one solver differ only in their limits.
fn shares_solver(method: TuneMethod) -> bool {
    matches!(method, TuneMethod::None | TuneMethod::Depth | TuneMethod::Size)
}

#[derive(Default)]
struct Work {
    calls: usize,
    subproblems: usize,
}

/// Solves every grid value on `d`, one result per value in grid order.
fn solve_grid(cfg: &TuneConfig, values: &[f64], d: &BinaryDataset, work: &mut Work) -> Vec<Result<Solution>> {
    let n = d.instance_count();
    if shares_solver(cfg.method) {
        let mut solver = match Solver::new(d, cfg.objective, cfg.penalties) {
            Ok(s) => s,
            Err(e) => {
                let msg = e.to_string();
                return values
                    .iter()
                    .map(|_| Err(Error::InvalidParameter(msg.clone())))
                    .collect();
            }
        };
        // widest limits first so later solves hit the cache
        let mut out: Vec<Option<Result<Solution>>> = values.iter().map(|_| None).collect();
        for i in (0..values.len()).rev() {
            work.calls += 1;
            out[i] = Some(setting(cfg, values[i], n).and_then(|(_, _, limits)| solver.solve(limits)));
        }
        work.subproblems += solver.cache_stats().subproblems;
        out.into_iter().map(Option::unwrap).collect()
    } else {
        values
            .iter()
            .map(|&v| {
                work.calls += 1;
                let (objective, pen, limits) = setting(cfg, v, n)?;
                let sol = Solver::new(d, objective, pen)?.solve(limits)?;
                work.subproblems += sol.cache_stats.subproblems;
                Ok(sol)
            })
            .collect()
    }
}

/// Cross-validates every grid setting and retrains on all of `d` with the
/// setting of best mean validation accuracy. Ties go to the more
/// regularized setting; settings infeasible on any fold are skipped.
pub fn tune(d: &BinaryDataset, cfg: &TuneConfig) -> Result<TuneResult> {
    let n = d.instance_count();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let mut work = Work::default();
    if cfg.method == TuneMethod::None {
        let grid = TuneGrid {
            method: TuneMethod::None,
            values: vec![cfg.max_depth as f64],
            k_requested: 1,
        };
        let solution = solve_grid(cfg, &grid.values, d, &mut work).remove(0)?;
        return Ok(TuneResult {
            method: cfg.method,
            chosen: 0,
            chosen_value: grid.values[0],
            grid,
            solution,
            cv_table: Vec::new(),
            solver_calls: work.calls,
            subproblems: work.subproblems,
        });
    }

    let majority = d.majority_fraction().min(1.0 - 1.0 / n as f64).max(0.5);
    let grid = make_grid(cfg.method, cfg.k, n, majority, cfg.max_depth)?;
    let folds = stratified_kfold(d, fold_count(n)?, cfg.seed)?;
    let mut cv_table = Vec::with_capacity(grid.values.len() * folds.len());
    let mut sums = vec![Some(0.0); grid.values.len()];
    for (fi, fold) in folds.iter().enumerate() {
        let train = d.subset(&fold.train)?;
        let validation = d.subset(&fold.validation)?;
        let results = solve_grid(cfg, &grid.values, &train, &mut work);
        for (si, result) in results.into_iter().enumerate() {
            let acc = match result {
                Ok(sol) => Some(accuracy(&sol.tree, &validation)?),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            };
            sums[si] = match (sums[si], acc) {
                (Some(s), Some(a)) => Some(s + a),
                _ => None,
            };
            cv_table.push(CvRow {
                setting: si,
                value: grid.values[si],
                fold: fi,
                accuracy: acc,
            });
        }
    }
    cv_table.sort_by_key(|r| (r.setting, r.fold));

    let stricter_later = cfg.method.larger_is_stricter();
    let mut chosen: Option<(usize, f64)> = None;
    for (i, s) in sums.iter().enumerate() {
        let Some(s) = s else { continue };
        let mean = s / folds.len() as f64;
        let better = match chosen {
            None => true,
            Some((_, m)) => mean > m + 1e-12 || (stricter_later && (mean - m).abs() <= 1e-12),
        };
        if better {
            chosen = Some((i, mean));
        }
    }
    let (chosen, _) = chosen.ok_or_else(|| Error::Infeasible("every tuning setting was infeasible".into()))?;
    let value = grid.values[chosen];
    work.calls += 1;
    let (objective, pen, limits) = setting(cfg, value, n)?;
    let solution = Solver::new(d, objective, pen)?.solve(limits)?;
    work.subproblems += solution.cache_stats.subproblems;
    Ok(TuneResult {
        method: cfg.method,
        chosen,
        chosen_value: value,
        grid,
        solution,
        cv_table,
        solver_calls: work.calls,
        subproblems: work.subproblems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_rule() {
        assert_eq!(fold_count(80).unwrap(), 20);
        assert_eq!(fold_count(100).unwrap(), 20);
        assert_eq!(fold_count(101).unwrap(), 10);
        assert_eq!(fold_count(200).unwrap(), 10);
        assert_eq!(fold_count(250).unwrap(), 10);
        assert_eq!(fold_count(251).unwrap(), 5);
        assert_eq!(fold_count(1000).unwrap(), 5);
        assert_eq!(fold_count(7).unwrap(), 7);
        assert!(fold_count(1).is_err());
    }

    #[test]
    fn depth_grid() {
        let g = make_grid(TuneMethod::Depth, 16, 500, 0.6, 4).unwrap();
        assert_eq!(g.values, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        let g = make_grid(TuneMethod::Depth, 3, 500, 0.6, 4).unwrap();
        assert_eq!(g.values, vec![0.0, 2.0, 4.0]);
    }

    #[test]
    fn size_grid() {
        let g = make_grid(TuneMethod::Size, 5, 500, 0.6, 4).unwrap();
        assert_eq!(g.values, vec![0.0, 1.0, 2.0, 6.0, 15.0]);
        let g = make_grid(TuneMethod::Size, 16, 500, 0.6, 4).unwrap();
        assert_eq!(g.values, (0..=15).map(f64::from).collect::<Vec<_>>());
    }

    #[test]
    fn cost_grid_endpoints() {
        for k in [2, 3, 8, 16] {
            let g = make_grid(TuneMethod::ComplexityCost, k, 1000, 0.7, 3).unwrap();
            assert_eq!(g.values[0], 0.0);
            assert_eq!(*g.values.last().unwrap(), 0.05);
            assert!(g.values.len() <= k);
        }
    }

    #[test]
    fn support_grid_has_one() {
        let g = make_grid(TuneMethod::MinSupport, 8, 200, 0.8, 3).unwrap();
        assert_eq!(support_count(g.values[0], 200), 1);
        assert!((g.values.last().unwrap() - 0.2).abs() < 1e-12);
        for w in g.values.windows(2) {
            assert!(w[1] - w[0] >= 1.0 / 200.0 - 1e-15);
        }
    }

    #[test]
    fn min_step_drops_close_values() {
        let v = enforce_min_step(vec![1.0, 1.05, 1.5, 1.55, 2.0], 0.1);
        assert_eq!(v, vec![1.0, 1.5, 2.0]);
        let v = enforce_min_step(vec![1.0, 1.95, 2.0], 0.1);
        assert_eq!(v, vec![1.0, 2.0]);
    }

    #[test]
    fn method_names_round_trip() {
        for m in TuneMethod::ALL {
            assert_eq!(m.name().parse::<TuneMethod>().unwrap(), m);
        }
        assert!("bogus".parse::<TuneMethod>().is_err());
    }
}
