//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "survrank", version, about = "Sparse pairwise-ranking survival models with bootstrap risk stratification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic cohort with a known sparse model.
    Synth(SynthArgs),
    /// Train the ranking model on a whole cohort.
    Fit(FitArgs),
    /// Repeated discovery/validation runs and the aggregated risk formula.
    Bootstrap(BootstrapArgs),
    /// Proposed model, ranking SVM and L1 Cox on identical splits.
    Compare(CompareArgs),
    /// Two-group log-rank analysis of a single covariate.
    Univariate(UnivariateArgs),
    /// Score a cohort with a risk formula and stratify it at the median risk.
    ApplyRisk(ApplyRiskArgs),
    /// Kaplan-Meier curve of a time/event CSV.
    Km(KmArgs),
    /// Log-rank test between two labelled groups of a time/event CSV.
    Logrank(LogrankArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Synth(_) => "synth",
            Command::Fit(_) => "fit",
            Command::Bootstrap(_) => "bootstrap",
            Command::Compare(_) => "compare",
            Command::Univariate(_) => "univariate",
            Command::ApplyRisk(_) => "apply-risk",
            Command::Km(_) => "km",
            Command::Logrank(_) => "logrank",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Synth(a) => &a.common,
            Command::Fit(a) => &a.common,
            Command::Bootstrap(a) => &a.common,
            Command::Compare(a) => &a.common,
            Command::Univariate(a) => &a.common,
            Command::ApplyRisk(a) => &a.common,
            Command::Km(a) => &a.common,
            Command::Logrank(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Directory receiving outputs and the manifest.
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file with defaults; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Cohort CSV with `id`, `time`, `event` and covariate columns.
    #[arg(long)]
    pub input: PathBuf,
    /// TOML schema; without one, covariates are taken from the CSV header.
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TrainFlags {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Per-epoch pair budget above which gradients use sampled pairs.
    #[arg(long)]
    pub pair_subsample: Option<usize>,
    /// Always use every comparable pair.
    #[arg(long, conflicts_with = "pair_subsample")]
    pub full_batch: bool,
    /// Append an unpenalized bias term to the scorer.
    #[arg(long)]
    pub intercept: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BootstrapFlags {
    /// Number of bootstrap runs.
    #[arg(long = "B")]
    pub runs: Option<usize>,
    /// Number of covariates kept in the risk formula.
    #[arg(long = "K")]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub discovery_fraction: Option<f64>,
    /// Outcome shuffles per run for the permutation baseline (0 disables it).
    #[arg(long)]
    pub baseline_shuffles: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// TOML schema; defaults to the built-in 23-covariate clinicopathological layout.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of nonzero true coefficients.
    #[arg(long)]
    pub sparsity: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub baseline_time: Option<f64>,
    /// Administrative censoring time in months.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Upper end of the uniform dropout distribution.
    #[arg(long)]
    pub censoring_max: Option<f64>,
    #[arg(long)]
    pub event_fraction: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub train: TrainFlags,
}

#[derive(Debug, Clone, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub bootstrap: BootstrapFlags,
    #[command(flatten)]
    pub train: TrainFlags,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub bootstrap: BootstrapFlags,
    #[command(flatten)]
    pub train: TrainFlags,
    /// L2 weight of the ranking SVM.
    #[arg(long)]
    pub ssvm_l2: Option<f64>,
    /// L1 weight of the Cox model.
    #[arg(long)]
    pub cox_l1: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct UnivariateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub covariate: String,
    /// Split at `x <= t` vs `x > t`; defaults to the cohort median. Ignored for indicators.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Truncate follow-up at this many months first.
    #[arg(long)]
    pub censor_at: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ApplyRiskArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub input: InputArgs,
    /// Risk formula JSON as written by `bootstrap`.
    #[arg(long)]
    pub formula: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct KmArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// CSV with `time` and `event` columns.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub censor_at: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct LogrankArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// CSV with `time`, `event` and a group label column.
    #[arg(long)]
    pub input: PathBuf,
    /// Column holding exactly two distinct labels.
    #[arg(long, default_value = "group")]
    pub group_column: String,
}
