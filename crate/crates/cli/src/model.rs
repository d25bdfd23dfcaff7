use std::time::Instant;

use anyhow::{bail, Result};
use treebench::greedy::{fit_tuned, grow, GrowConfig, NumericMode};
use treebench::tuning::{tune, TuneConfig};
use treebench::{solve, BinaryDataset, Objective, ObjectiveParams, Penalties, SolveLimits, Tree, TuneMethod};

use crate::args::{Method, ModelArgs, ObjectiveArgs};

pub fn objective(args: &ObjectiveArgs) -> Result<Objective> {
    let params =
        ObjectiveParams::new(args.alpha, args.rho0, args.rho1, args.smoothing)?.with_table1_base(args.mdl_bits);
    Ok(Objective::new(args.objective, params)?)
}

/// Everything needed to train one tree.
#[derive(Debug, Clone, Copy)]
pub struct TrainSpec {
    pub method: Method,
    pub objective: Objective,
    pub tune: TuneMethod,
    pub k: usize,
    /// `None` only for greedy growth without a limit.
    pub max_depth: Option<usize>,
    pub max_branching: Option<usize>,
    pub penalties: Penalties,
    pub numeric_mode: NumericMode,
    pub seed: u64,
}

impl TrainSpec {
    pub fn from_args(method: Method, m: &ModelArgs, numeric_mode: NumericMode, seed: u64) -> Result<TrainSpec> {
        Ok(TrainSpec {
            method,
            objective: objective(&m.objective)?,
            tune: m.tune,
            k: m.k,
            max_depth: (!m.no_depth_limit).then_some(m.max_depth),
            max_branching: m.max_branching,
            penalties: Penalties {
                lambda_cost: m.lambda,
                omega_cost: m.omega,
                min_support: m.min_support,
            },
            numeric_mode,
            seed,
        })
    }

    pub fn depth_label(&self) -> String {
        self.max_depth.map_or_else(|| "none".to_string(), |d| d.to_string())
    }

    /// Rejects method and option combinations that have no meaning.
    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::Optimal => {
                if self.max_depth.is_none() {
                    bail!("optimal search needs a depth limit");
                }
                if self.max_branching.is_some() && self.tune != TuneMethod::None {
                    bail!("--max-branching applies only without tuning");
                }
            }
            Method::Greedy => {
                if !matches!(self.tune, TuneMethod::None | TuneMethod::ComplexityCost) {
                    bail!("greedy trees are tuned only by cost-complexity pruning (`--tune cost`)");
                }
                if self.max_branching.is_some() {
                    bail!("--max-branching applies only to optimal search");
                }
            }
        }
        self.penalties.validate()?;
        Ok(())
    }
}

/// One cross-validation line: setting index, its value, fold (or `mean`)
/// and validation accuracy (empty when the setting was infeasible).
pub type CvLine = (usize, f64, String, Option<f64>);

pub struct Trained {
    pub tree: Tree,
    pub chosen_value: Option<f64>,
    pub cv: Vec<CvLine>,
    pub wall_ms: f64,
}

pub fn train(spec: &TrainSpec, d: &BinaryDataset) -> Result<Trained> {
    spec.validate()?;
    let start = Instant::now();
    let (tree, chosen_value, cv) = match spec.method {
        Method::Optimal => {
            let depth = spec.max_depth.expect("validated");
            if spec.tune == TuneMethod::None {
                let limits = match spec.max_branching {
                    Some(b) => SolveLimits::new(depth, b)?,
                    None => SolveLimits::depth(depth),
                };
                let s = solve(d, &spec.objective, limits, &spec.penalties)?;
                (s.tree, None, Vec::new())
            } else {
                let r = tune(
                    d,
                    &TuneConfig {
                        objective: spec.objective,
                        method: spec.tune,
                        k: spec.k,
                        max_depth: depth,
                        penalties: spec.penalties,
                        seed: spec.seed,
                    },
                )?;
                let cv = r
                    .cv_table
                    .iter()
                    .map(|row| (row.setting, row.value, row.fold.to_string(), row.accuracy))
                    .collect();
                (r.solution.tree, Some(r.chosen_value), cv)
            }
        }
        Method::Greedy => {
            let cfg = GrowConfig {
                objective: spec.objective,
                max_depth: spec.max_depth,
                min_support: spec.penalties.min_support,
                numeric_mode: spec.numeric_mode,
            };
            if spec.tune == TuneMethod::ComplexityCost {
                let t = fit_tuned(d, &cfg, spec.seed)?;
                let cv = t
                    .candidates
                    .iter()
                    .zip(&t.cv_accuracy)
                    .enumerate()
                    .map(|(i, (&a, &acc))| (i, a, "mean".to_string(), Some(acc)))
                    .collect();
                (t.tree, Some(t.alpha), cv)
            } else {
                (grow(d, &cfg)?, None, Vec::new())
            }
        }
    };
    Ok(Trained {
        tree,
        chosen_value,
        cv,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
