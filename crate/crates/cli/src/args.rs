use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treebench::greedy::NumericMode;
use treebench::{ObjectiveKind, TuneMethod};

#[derive(Debug, Parser)]
#[command(
    name = "treebench",
    version,
    about = "Optimal and greedy decision trees with tuning and benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Binarize a CSV at training quantiles and write 0/1 CSVs.
    Binarize(BinarizeArgs),
    /// Train one tree and report it.
    Fit(FitArgs),
    /// Like `fit`, and also write the cross-validation table.
    Tune(FitArgs),
    /// Generate a synthetic train/test pair with its ground truth.
    Synth(SynthArgs),
    /// Run a method matrix over replications or datasets.
    Bench(BenchArgs),
    /// Sweep tree size and report the size-weighted accuracy.
    Swa(SwaArgs),
    /// Average ranks and the Nemenyi critical distance.
    Rank(RankArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Optimal,
    Greedy,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Optimal => "optimal",
            Method::Greedy => "greedy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Tree,
    Linear,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Training CSV. All-0/1 files are used as binary features directly.
    #[arg(long)]
    pub data: PathBuf,
    /// Held-out CSV with the same columns.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    pub label: String,
    /// `name,kind` lines overriding inferred column kinds.
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BinarizeOptions {
    #[arg(long, default_value_t = 10)]
    pub quantiles: usize,
    #[arg(long, default_value_t = 20)]
    pub max_categories: usize,
    /// `binary` uses quantile thresholds, `raw` every midpoint.
    #[arg(long, default_value = "binary")]
    pub numeric_mode: NumericMode,
}

#[derive(Debug, Clone, Args)]
pub struct ObjectiveArgs {
    #[arg(long, default_value = "accuracy")]
    pub objective: ObjectiveKind,
    /// Confidence level of the pessimistic binomial estimate.
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.5)]
    pub rho0: f64,
    #[arg(long, default_value_t = 2.5)]
    pub rho1: f64,
    /// Smoothing parameter of the smoothed objective.
    #[arg(long, default_value_t = 0.0)]
    pub smoothing: f64,
    /// Evaluate the Quinlan code length bound in bits.
    #[arg(long)]
    pub mdl_bits: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[arg(long, default_value_t = 3)]
    pub max_depth: usize,
    /// Grow greedy trees without a depth limit.
    #[arg(long)]
    pub no_depth_limit: bool,
    /// Branching-node budget for untuned optimal search.
    #[arg(long)]
    pub max_branching: Option<usize>,
    /// Per-leaf complexity cost.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Per-instance cost of each question asked.
    #[arg(long, default_value_t = 0.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1)]
    pub min_support: usize,
    #[arg(long, default_value = "none")]
    pub tune: TuneMethod,
    /// Requested grid size for tuning.
    #[arg(long, default_value_t = 16)]
    pub k: usize,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub binarize: BinarizeOptions,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "optimal")]
    pub method: Method,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Record wall time in the report. Reports are then not reproducible.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BinarizeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub binarize: BinarizeOptions,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SynthOptions {
    #[arg(long, value_enum, default_value = "tree")]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    /// Depth of the ground-truth tree.
    #[arg(long, default_value_t = 3)]
    pub truth_depth: usize,
    #[arg(long, default_value_t = 0.0)]
    pub feature_noise: f64,
    #[arg(long, default_value_t = 0.0)]
    pub class_noise: f64,
    #[arg(long, default_value_t = 1000)]
    pub test_per_leaf: usize,
    /// Test set size for the linear kind.
    #[arg(long, default_value_t = 1000)]
    pub test_size: usize,
    #[arg(long, default_value_t = 5)]
    pub min_leaf: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub synth: SynthOptions,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Dataset CSVs. Without any, synthetic replications are generated.
    #[arg(long = "data")]
    pub datasets: Vec<PathBuf>,
    #[arg(long, default_value = "label")]
    pub label: String,
    /// Each dataset is split into this many stratified folds and the first
    /// one is held out.
    #[arg(long, default_value_t = 4)]
    pub holdout_folds: usize,
    #[command(flatten)]
    pub synth: SynthOptions,
    #[command(flatten)]
    pub binarize: BinarizeOptions,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    /// Splitting criterion for greedy runs; defaults to `--objective`.
    #[arg(long)]
    pub greedy_objective: Option<ObjectiveKind>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "optimal,greedy")]
    pub methods: Vec<Method>,
    /// Depth limits; `none` grows greedy trees without one.
    #[arg(long = "max-depth", value_delimiter = ',', default_value = "3")]
    pub depths: Vec<String>,
    /// Tuning methods. Greedy runs accept `none` and `cost`.
    #[arg(long = "tune", value_delimiter = ',', default_value = "none")]
    pub tunes: Vec<TuneMethod>,
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Report CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Keep the rows already in `--out` and run only the missing ones.
    #[arg(long)]
    pub resume: bool,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SwaArgs {
    /// Training CSV; without it one synthetic dataset is generated.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    pub label: String,
    #[command(flatten)]
    pub synth: SynthOptions,
    #[command(flatten)]
    pub binarize: BinarizeOptions,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[arg(long, value_enum, default_value = "optimal")]
    pub method: Method,
    #[arg(long, default_value_t = 4)]
    pub max_depth: usize,
    /// Largest tree size in leaves.
    #[arg(long, default_value_t = 16)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    /// Score matrix CSV: a `dataset` column then one column per method.
    #[arg(long, conflicts_with = "report", required_unless_present = "report")]
    pub scores: Option<PathBuf>,
    /// Benchmark report to pivot on test accuracy.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// JSON output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
