//! Leaf-additive objectives.
//!
//! Each objective scores a leaf from two counts only: `n`, the instances that
//! reach it, and `e`, the instances misclassified by its majority label. A
//! tree's objective is the sum over its leaves, which is what lets the
//! optimal solver decompose over subtrees.
//!
//! Conventions shared by every kind: a leaf with `n = 0` costs 0, and any
//! `0·log 0` or `0/0` term evaluates to 0.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjectiveKind {
    Accuracy,
    Gini,
    SqrtGini,
    Entropy,
    MinError,
    BinomPessimistic,
    MdlQuinlan,
    MdlMehta,
    Bayes,
    MLoss,
    LLoss,
    SmoothedAccuracy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcavityClass {
    StrictlyConcave,
    NonConcave,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 12] = [
        ObjectiveKind::Accuracy,
        ObjectiveKind::Gini,
        ObjectiveKind::SqrtGini,
        ObjectiveKind::Entropy,
        ObjectiveKind::MinError,
        ObjectiveKind::BinomPessimistic,
        ObjectiveKind::MdlQuinlan,
        ObjectiveKind::MdlMehta,
        ObjectiveKind::Bayes,
        ObjectiveKind::MLoss,
        ObjectiveKind::LLoss,
        ObjectiveKind::SmoothedAccuracy,
    ];

    /// Stable lowercase name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::Accuracy => "accuracy",
            ObjectiveKind::Gini => "gini",
            ObjectiveKind::SqrtGini => "sqrt-gini",
            ObjectiveKind::Entropy => "entropy",
            ObjectiveKind::MinError => "min-error",
            ObjectiveKind::BinomPessimistic => "binom",
            ObjectiveKind::MdlQuinlan => "mdl-quinlan",
            ObjectiveKind::MdlMehta => "mdl-mehta",
            ObjectiveKind::Bayes => "bayes",
            ObjectiveKind::MLoss => "m-loss",
            ObjectiveKind::LLoss => "l-loss",
            ObjectiveKind::SmoothedAccuracy => "smoothed",
        }
    }

    pub fn concavity_class(self) -> ConcavityClass {
        match self {
            ObjectiveKind::Gini
            | ObjectiveKind::SqrtGini
            | ObjectiveKind::Entropy
            | ObjectiveKind::MdlQuinlan
            | ObjectiveKind::MdlMehta
            | ObjectiveKind::Bayes => ConcavityClass::StrictlyConcave,
            ObjectiveKind::Accuracy
            | ObjectiveKind::MinError
            | ObjectiveKind::BinomPessimistic
            | ObjectiveKind::MLoss
            | ObjectiveKind::LLoss
            | ObjectiveKind::SmoothedAccuracy => ConcavityClass::NonConcave,
        }
    }

    /// Kinds whose leaf cost is always an integer, so sums compare exactly.
    pub fn is_integer_valued(self) -> bool {
        matches!(self, ObjectiveKind::Accuracy)
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ObjectiveKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownObjective(s.to_string()))
    }
}

pub fn concavity_class(kind: ObjectiveKind) -> ConcavityClass {
    kind.concavity_class()
}

/// Constants used by the parameterized kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveParams {
    alpha: f64,
    z_alpha: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub x: f64,
    /// Evaluates the bound term of the Quinlan code length in bits instead
    /// of nats. This reproduces the published comparison table.
    pub mdl_quinlan_table1_base: bool,
}

impl ObjectiveParams {
    pub const CLASS_COUNT: f64 = 2.0;

    pub fn new(alpha: f64, rho0: f64, rho1: f64, x: f64) -> Result<Self> {
        let params = ObjectiveParams {
            alpha,
            z_alpha: z_for_alpha(alpha)?,
            rho0,
            rho1,
            x,
            mdl_quinlan_table1_base: false,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_smoothing(mut self, x: f64) -> Result<Self> {
        self.x = x;
        self.validate()?;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.z_alpha = z_for_alpha(alpha)?;
        self.alpha = alpha;
        Ok(self)
    }

    pub fn with_table1_base(mut self, on: bool) -> Self {
        self.mdl_quinlan_table1_base = on;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Upper-tail normal quantile for `alpha`, i.e. `Φ⁻¹(1 − alpha)`.
    pub fn z_alpha(&self) -> f64 {
        self.z_alpha
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.rho0 > 0.0 && self.rho1 > 0.0) || !self.rho0.is_finite() || !self.rho1.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rho0 and rho1 must be positive, got {} and {}",
                self.rho0, self.rho1
            )));
        }
        if !(self.x >= 0.0 && self.x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "smoothing x must be nonnegative, got {}",
                self.x
            )));
        }
        Ok(())
    }
}

impl Default for ObjectiveParams {
    fn default() -> Self {
        ObjectiveParams::new(0.25, 2.5, 2.5, 0.0).expect("default parameters are valid")
    }
}

fn z_for_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(Normal::standard().inverse_cdf(1.0 - alpha))
}

/// Instance count and majority-label misclassifications of one leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LeafStats {
    pub n: usize,
    pub e: usize,
}

impl LeafStats {
    pub fn new(n: usize, e: usize) -> Result<Self> {
        if 2 * e > n {
            return Err(Error::InvalidParameter(format!(
                "leaf ({n}, {e}) violates majority labeling e <= n - e"
            )));
        }
        Ok(LeafStats { n, e })
    }

    /// Leaf stats from the instance count and the number of positives.
    #[inline]
    pub fn from_counts(n: usize, positives: usize) -> Self {
        debug_assert!(positives <= n);
        LeafStats {
            n,
            e: positives.min(n - positives),
        }
    }
}

/// An objective kind bound to its parameters. The hot path of both solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub params: ObjectiveParams,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, params: ObjectiveParams) -> Result<Self> {
        params.validate()?;
        Ok(Objective { kind, params })
    }

    #[inline]
    pub fn leaf_value(&self, n: usize, e: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        let ef = e as f64;
        match self.kind {
            ObjectiveKind::Accuracy => ef,
            ObjectiveKind::Gini => nf * gini_impurity(n, e),
            ObjectiveKind::SqrtGini => nf * gini_impurity(n, e).max(0.0).sqrt(),
            ObjectiveKind::Entropy => {
                let p0 = ef / nf;
                let p1 = (nf - ef) / nf;
                -nf / 2.0 * (xlog2x(p0) + xlog2x(p1))
            }
            ObjectiveKind::MinError => nf * (ef + 1.0) / (nf + 2.0),
            ObjectiveKind::BinomPessimistic => binomial_pessimistic(n, e, &self.params),
            ObjectiveKind::MdlQuinlan => {
                let bound = n.div_ceil(2) as f64;
                let bound_term = if self.params.mdl_quinlan_table1_base {
                    (bound + 1.0).log2()
                } else {
                    (bound + 1.0).ln()
                };
                bound_term + ln_choose(n, e)
            }
            ObjectiveKind::MdlMehta => {
                let mut v = 0.0;
                if e > 0 {
                    v += ef * (nf / ef).ln();
                }
                if n > e {
                    v += (nf - ef) * (nf / (nf - ef)).ln();
                }
                v + 0.5 * (nf / 2.0).ln() + PI.ln()
            }
            ObjectiveKind::Bayes => {
                let p = &self.params;
                let ratio = ln_beta_unchecked(ef + p.rho0, nf - ef + p.rho1) - ln_beta_unchecked(p.rho0, p.rho1);
                // B is decreasing in both arguments, so the ratio is ≤ 1.
                (-ratio).max(0.0)
            }
            ObjectiveKind::MLoss => {
                let r = ef / nf;
                nf * (1.0 / (1.0 - r) - 1.0)
            }
            ObjectiveKind::LLoss => {
                let r = ef / nf;
                nf * (1.0 / (1.0 - r * r).sqrt() - 1.0)
            }
            ObjectiveKind::SmoothedAccuracy => {
                let x = self.params.x;
                nf * (ef + x) / (nf + ObjectiveParams::CLASS_COUNT * x)
            }
        }
    }

    #[inline]
    pub fn leaf_value_of(&self, stats: LeafStats) -> f64 {
        self.leaf_value(stats.n, stats.e)
    }
}

/// Validating entry point: checks the parameters and the leaf stats.
pub fn leaf_value(kind: ObjectiveKind, params: &ObjectiveParams, stats: LeafStats) -> Result<f64> {
    let objective = Objective::new(kind, *params)?;
    let stats = LeafStats::new(stats.n, stats.e)?;
    Ok(objective.leaf_value_of(stats))
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "log_beta needs positive arguments, got ({a}, {b})"
        )));
    }
    Ok(ln_beta_unchecked(a, b))
}

#[inline]
fn ln_beta_unchecked(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `ln C(n, k)` via `ln Γ`, exact to rounding for large `n`.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    if k == 0 || k == n {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

#[inline]
fn gini_impurity(n: usize, e: usize) -> f64 {
    let p0 = e as f64 / n as f64;
    let p1 = (n - e) as f64 / n as f64;
    1.0 - p0 * p0 - p1 * p1
}

#[inline]
fn xlog2x(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.ln() / LN_2
    }
}

fn binomial_pessimistic(n: usize, e: usize, params: &ObjectiveParams) -> f64 {
    let nf = n as f64;
    if e == 0 {
        return nf * (1.0 - (params.alpha.ln() / nf).exp());
    }
    if e == n {
        return e as f64;
    }
    let z2 = params.z_alpha * params.z_alpha;
    let ep = e as f64 + 0.5;
    let spread = (z2 * (ep * (1.0 - ep / nf) + z2 / 4.0)).sqrt();
    (ep + z2 / 2.0 + spread) / (nf + z2) * nf
}
