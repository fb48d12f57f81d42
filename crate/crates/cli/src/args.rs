use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Boosted tree ensembles with counterfactual explanations.
///
/// Exit codes: 0 success (including "no counterfactual found"), 1 usage,
/// 2 data, model or instance error, 3 training failure, 4 flip-soundness
/// violation detected by `verify`. Every flag can also be set through a
/// `TWEAKBOOST_*` environment variable; flags win.
#[derive(Debug, Parser)]
#[command(name = "tweakboost", version, about, long_about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train an ensemble and write the model JSON.
    Train(TrainArgs),
    /// Explain one instance with a minimal prediction-flipping change.
    Explain(ExplainArgs),
    /// Write stage weights and cumulative mass as CSV.
    ReportAlphas(ReportAlphasArgs),
    /// Write sample-weight trajectories of training instances as CSV.
    ReportTrajectories(ReportTrajectoriesArgs),
    /// Compare explanations against the brute-force grid oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    /// Six census-style features with a logistic label.
    Adult,
    /// Two features with a curved boundary.
    Toy2d,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training CSV with a header row.
    #[arg(long, env = "TWEAKBOOST_DATA", conflicts_with = "demo", required_unless_present = "demo")]
    pub data: Option<PathBuf>,
    /// Use a bundled synthetic dataset instead of a CSV.
    #[arg(long, env = "TWEAKBOOST_DEMO", value_enum)]
    pub demo: Option<Demo>,
    /// Rows generated for `--demo`.
    #[arg(long, env = "TWEAKBOOST_DEMO_ROWS", default_value_t = 1000, value_parser = clap::value_parser!(u64).range(2..))]
    pub demo_rows: u64,
    #[arg(long, env = "TWEAKBOOST_LABEL_COLUMN", default_value = "label")]
    pub label_column: String,
    /// Label mapping such as `yes=+1,no=-1`; numeric ±1 labels when omitted.
    #[arg(long, env = "TWEAKBOOST_LABEL_MAP")]
    pub label_map: Option<String>,
    /// Boosting rounds.
    #[arg(long, env = "TWEAKBOOST_K", default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, env = "TWEAKBOOST_DEPTH", default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub depth: u64,
    /// Seeds demo generation and the train/test split.
    #[arg(long, env = "TWEAKBOOST_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Hold out `1 - F` of the rows as a test split.
    #[arg(long, env = "TWEAKBOOST_TRAIN_FRACTION")]
    pub train_fraction: Option<f64>,
    #[arg(long, env = "TWEAKBOOST_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EpsilonModeArg {
    Absolute,
    RangeScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L2Std,
    L1Std,
    L0,
}

#[derive(Debug, Args)]
pub struct TweakArgs {
    #[arg(long, env = "TWEAKBOOST_EPSILON", default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, env = "TWEAKBOOST_EPSILON_MODE", value_enum, default_value_t = EpsilonModeArg::RangeScaled)]
    pub epsilon_mode: EpsilonModeArg,
    #[arg(long, env = "TWEAKBOOST_NORM", value_enum, default_value_t = NormArg::L2Std)]
    pub norm: NormArg,
    /// Worker threads for candidate evaluation.
    #[arg(long, env = "TWEAKBOOST_THREADS", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
    pub threads: u64,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long, env = "TWEAKBOOST_MODEL")]
    pub model: PathBuf,
    /// Index into the training split.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "instance", required_unless_present = "instance")]
    pub row: Option<i64>,
    /// Comma-separated feature values.
    #[arg(long, allow_hyphen_values = true)]
    pub instance: Option<String>,
    #[command(flatten)]
    pub tweak: TweakArgs,
    /// `alpha-mass[:F]` or `trajectory[:W[:TOL]]`; repeat to combine (largest K' wins).
    #[arg(long, env = "TWEAKBOOST_PRUNE", value_delimiter = ';')]
    pub prune: Vec<String>,
    /// Explain rows the model gets wrong instead of rejecting them.
    #[arg(long)]
    pub allow_misclassified: bool,
    #[arg(long, env = "TWEAKBOOST_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportAlphasArgs {
    #[arg(long, env = "TWEAKBOOST_MODEL")]
    pub model: PathBuf,
    #[arg(long, env = "TWEAKBOOST_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportTrajectoriesArgs {
    #[arg(long, env = "TWEAKBOOST_MODEL")]
    pub model: PathBuf,
    /// Training-split index; repeatable.
    #[arg(long = "row", allow_negative_numbers = true, required_unless_present = "pair")]
    pub rows: Vec<i64>,
    /// Also export the first correctly and first incorrectly classified training rows.
    #[arg(long)]
    pub pair: bool,
    /// Directory receiving one `trajectory_<row>.csv` per instance.
    #[arg(long, env = "TWEAKBOOST_OUT_DIR")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, env = "TWEAKBOOST_MODEL")]
    pub model: PathBuf,
    /// Number of training rows to check.
    #[arg(long, env = "TWEAKBOOST_VERIFY_ROWS", default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub rows: u64,
    /// Uniform grid steps per feature before threshold points are added.
    #[arg(long, env = "TWEAKBOOST_GRID_STEPS", default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    pub steps: u64,
    #[command(flatten)]
    pub tweak: TweakArgs,
    #[arg(long, env = "TWEAKBOOST_OUT")]
    pub out: Option<PathBuf>,
}
