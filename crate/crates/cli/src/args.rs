use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "kmerlin", version, about = "k-mer profile classifiers for nucleotide sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write k-mer count profiles of every FASTA record.
    Profile(ProfileArgs),
    /// Fit one classifier and save it as a model file.
    Train(TrainArgs),
    /// Classify FASTA records with a saved model.
    Predict(PredictArgs),
    /// Cross-validate a grid of classifiers, k values and fragment lengths.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub fasta: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=31))]
    pub k: u8,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub fasta: PathBuf,
    /// Two-column manifest: sequence id, class label.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=31))]
    pub k: u8,
    /// MB, Markov, LR or LSVM, or a full id such as `LSVM_L2` or `MB_alpha=1e-2`.
    #[arg(long)]
    pub model: String,
    /// Smoothing for MB/Markov: a positive number or `mle`.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, value_enum)]
    pub penalty: Option<PenaltyArg>,
    #[arg(long = "C", default_value_t = 1.0)]
    pub cost: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Penalize linear-model intercepts like weights (off by default).
    #[arg(long)]
    pub penalize_intercept: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Accept manifest ids that match no sequence.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub fasta: PathBuf,
    /// Append per-class scores.
    #[arg(long)]
    pub scores: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report unscorable records and still exit 0.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// JSON run configuration; the flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub fasta: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub task: Option<String>,
    /// Single k or an inclusive range such as `4-15`.
    #[arg(long)]
    pub k: Option<String>,
    /// Comma-separated model ids or families (MB, Markov, LR, LSVM).
    #[arg(long)]
    pub model: Option<String>,
    /// Comma-separated α values for MB/Markov; `mle` for maximum likelihood.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub penalty: Option<Vec<PenaltyArg>>,
    /// Penalize linear-model intercepts like weights (off by default).
    #[arg(long)]
    pub penalize_intercept: bool,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Comma-separated lengths; 0 means complete sequences.
    #[arg(long, value_delimiter = ',')]
    pub fragment_lengths: Option<Vec<usize>>,
    #[arg(long)]
    pub max_per_class: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Option<Vec<FormatArg>>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyArg {
    #[value(alias = "L1")]
    L1,
    #[value(alias = "L2")]
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Svg,
}
