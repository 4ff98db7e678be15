use std::path::PathBuf;

use askless_core::learning::Criterion;
use askless_core::reduction::SelectionMode;
use askless_core::Engine;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "askless",
    version,
    about = "Shorter surveys through Bayesian-network segment models"
)]
pub struct Cli {
    /// Seed for every random choice; commands are reproducible for a fixed seed.
    #[arg(long, global = true, env = "ASKLESS_SEED")]
    pub seed: Option<u64>,

    /// Only print warnings and errors to standard error.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample labelled synthetic respondents to a CSV file.
    Generate(GenerateArgs),
    /// Learn structure and parameters from labelled responses.
    Learn(LearnArgs),
    /// Search for the smallest question count that keeps segmentation accurate.
    #[command(name = "find-k")]
    FindK(FindKArgs),
    /// Score segment predictions on a labelled test file.
    Evaluate(EvaluateArgs),
    /// Print the most likely segment for a set of answers.
    Predict(PredictArgs),
    /// Run the HTTP survey-session service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// `default` for the bundled questionnaire, or a schema JSON file.
    #[arg(long, default_value = "default")]
    pub schema: String,
    /// Generator configuration JSON; defaults to the bundled population.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of respondents (overrides the configuration).
    #[arg(long)]
    pub rows: Option<usize>,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    /// Labelled response CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// `default` for the bundled questionnaire, or a schema JSON file.
    #[arg(long, default_value = "default")]
    pub schema: String,
    #[arg(long, default_value = "aic")]
    pub score: Criterion,
    #[arg(long, default_value_t = 4)]
    pub max_parents: usize,
    /// Additive smoothing for CPT entries.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Fraction of rows used for learning; the rest is held out.
    #[arg(long, default_value_t = 0.7)]
    pub split: f64,
    /// Perturbed restarts of the structure search.
    #[arg(long, default_value_t = 0)]
    pub restarts: usize,
    /// Network JSON output. The row partition is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the held-out rows to this CSV.
    #[arg(long)]
    pub holdout: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InferenceArgs {
    /// `exact` (variable elimination) or `lw` (likelihood weighting).
    #[arg(long)]
    pub engine: Option<Engine>,
    /// Likelihood-weighting samples per query.
    #[arg(long, default_value_t = askless_core::inference::DEFAULT_SAMPLES)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct FindKArgs {
    /// Network JSON, or `default` for the bundled network.
    #[arg(long)]
    pub net: PathBuf,
    /// Labelled test CSV.
    #[arg(long)]
    pub test: PathBuf,
    /// Candidate question counts, ascending.
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20")]
    pub grid: Vec<usize>,
    #[arg(long, default_value_t = 0.70)]
    pub threshold: f64,
    /// `threshold`: smallest k reaching the threshold; `best`: highest score.
    #[arg(long, default_value = "threshold")]
    pub mode: SelectionMode,
    /// Questions that may be asked; defaults to every asked question.
    #[arg(long, value_delimiter = ',')]
    pub pool: Option<Vec<String>>,
    /// Engine defaults to `lw` here.
    #[command(flatten)]
    pub inference: InferenceArgs,
    /// Report JSON output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Network JSON, or `default` for the bundled network.
    #[arg(long)]
    pub net: PathBuf,
    /// Labelled test CSV.
    #[arg(long)]
    pub test: PathBuf,
    /// Random questions per respondent; defaults to the whole pool.
    #[arg(long)]
    pub k: Option<usize>,
    /// Engine defaults to `exact` here.
    #[command(flatten)]
    pub inference: InferenceArgs,
    /// Report JSON output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Network JSON, or `default` for the bundled network.
    #[arg(long)]
    pub net: PathBuf,
    /// JSON object of question -> level, inline or as a file path.
    #[arg(long)]
    pub evidence: String,
    /// Engine defaults to `exact` here.
    #[command(flatten)]
    pub inference: InferenceArgs,
    /// Print the full posterior as JSON instead of the segment.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Network JSON, or `default` for the bundled network.
    #[arg(long)]
    pub net: PathBuf,
    /// Questions per session when a request does not say.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Engine defaults to `exact` here.
    #[command(flatten)]
    pub inference: InferenceArgs,
    /// Idle sessions are dropped after this many hours.
    #[arg(long, default_value_t = 24.0)]
    pub ttl_hours: f64,
}
