//! Optimal and greedy binary decision trees under leaf-additive objectives,
//! with tuning, synthetic benchmarks and comparison metrics.

pub mod bitset;
pub mod data;
pub mod error;
pub mod greedy;
pub mod metrics;
pub mod objectives;
pub mod optimal;
pub mod synth;
pub mod tree;
pub mod tuning;

pub use bitset::Bitset;
pub use data::{Binarizer, BinaryDataset, RawDataset};
pub use error::{Error, Result};
pub use objectives::{Objective, ObjectiveKind, ObjectiveParams};
pub use optimal::{objective_of_tree, solve, Penalties, Solution, SolveLimits, Solver};
pub use tree::Tree;
pub use tuning::TuneMethod;
