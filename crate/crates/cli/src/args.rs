use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bacon", version, about = "Train and explain graded-logic classification trees")]
pub struct Cli {
    /// Flat TOML file with hyperparameters; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model on a CSV file and save it.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Model output path; defaults to save_path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classification metrics of a saved model on a CSV file.
    Evaluate {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Remove the deepest leaves of a model.
    Prune {
        #[command(flatten)]
        model: ModelArg,
        /// Number of deepest leaves to remove.
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        /// Optional data file to report accuracy before and after.
        #[command(flatten)]
        eval: OptEvalArgs,
    },
    /// Simplified tree JSON and the arithmetic expression of a model.
    Explain {
        #[command(flatten)]
        model: ModelArg,
        /// Merge adjacent nodes that snap to the same operator code.
        #[arg(long)]
        merge: bool,
        /// Write the tree JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accuracy, precision and recall over a grid of thresholds.
    Thresholds {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long = "threshold-step", default_value_t = 0.01)]
        threshold_step: f64,
    },
    /// Accuracy after pruning 0, 1, 2, … deepest leaves.
    Attribution {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Truth-table CSV of a Boolean expression.
    Boolgen {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a model against a Boolean expression on all 0/1 inputs.
    Boolcheck {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        expr: String,
    },
    /// Prompt text asking a language model for a plain-language report.
    ReportPrompt {
        #[command(flatten)]
        model: ModelArg,
        /// Domain context, inline.
        #[arg(long, conflicts_with = "context_file")]
        context: Option<String>,
        #[arg(long)]
        context_file: Option<PathBuf>,
        #[arg(long)]
        merge: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// POST the prompt to the endpoint in BACON_REPORT_ENDPOINT and print
        /// the response.
        #[arg(long)]
        send: bool,
    },
    /// Train on several seeded splits and report mean accuracy with a 95%
    /// confidence interval.
    Repeat {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long, default_value_t = 20)]
        runs: usize,
        /// Top features listed per run.
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
}

#[derive(Debug, Args)]
pub struct ModelArg {
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args, Default, Clone)]
pub struct DataArgs {
    /// CSV input with a header row and a label column.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Label column name; defaults to the last column.
    #[arg(long)]
    pub label: Option<String>,
    /// Label value counted as positive (one-vs-rest); labels must otherwise be 0/1.
    #[arg(long, allow_negative_numbers = true)]
    pub positive: Option<f64>,
    /// minmax, robust_sigmoid or none.
    #[arg(long)]
    pub normalizer: Option<String>,
    /// Columns mapped through 1 − x after normalization (comma separated, or `all`).
    #[arg(long, value_delimiter = ',')]
    pub reverse: Vec<String>,
    #[arg(long = "test-fraction")]
    pub test_fraction: Option<f64>,
    #[arg(long = "no-header")]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// all, train or test (the held-out rows recorded in the model).
    #[arg(long, default_value = "all")]
    pub split: String,
    /// Classification threshold; defaults to the model's.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OptEvalArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "all")]
    pub split: String,
    #[arg(long)]
    pub threshold: Option<f64>,
}

/// Training hyperparameters, spelled as in config files.
#[derive(Debug, Args, Default, Clone)]
pub struct TrainArgs {
    #[arg(long = "acceptance_threshold")]
    pub acceptance_threshold: Option<f64>,
    #[arg(long = "attempts")]
    pub attempts: Option<usize>,
    #[arg(long = "freeze_loss_threshold")]
    pub freeze_loss_threshold: Option<f64>,
    #[arg(long = "freeze_accept_threshold")]
    pub freeze_accept_threshold: Option<f64>,
    #[arg(long = "is_frozen", num_args = 0..=1, default_missing_value = "true")]
    pub is_frozen: Option<bool>,
    #[arg(long = "lock_loss_tolerance")]
    pub lock_loss_tolerance: Option<f64>,
    #[arg(long = "loss_amplifier")]
    pub loss_amplifier: Option<f64>,
    #[arg(long = "max_epochs")]
    pub max_epochs: Option<usize>,
    #[arg(long = "post_freeze_epochs")]
    pub post_freeze_epochs: Option<usize>,
    #[arg(long = "save_model", num_args = 0..=1, default_missing_value = "true")]
    pub save_model: Option<bool>,
    #[arg(long = "save_path")]
    pub save_path: Option<PathBuf>,
    #[arg(long = "tree_layout")]
    pub tree_layout: Option<String>,
    #[arg(long = "weight_penalty_strength")]
    pub weight_penalty_strength: Option<f64>,
    #[arg(long = "learning_rate")]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Classification threshold used for accuracy.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long = "initial_temperature")]
    pub initial_temperature: Option<f64>,
    #[arg(long = "temperature_decay")]
    pub temperature_decay: Option<f64>,
    #[arg(long = "min_noise")]
    pub min_noise: Option<f64>,
    #[arg(long = "max_noise")]
    pub max_noise: Option<f64>,
    #[arg(long = "noise_increase")]
    pub noise_increase: Option<f64>,
    #[arg(long = "noise_decrease")]
    pub noise_decrease: Option<f64>,
    #[arg(long = "history_window")]
    pub history_window: Option<usize>,
}
