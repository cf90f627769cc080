//! Argument surface and the exit-code contract.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "qksvm",
    version,
    about = "Quantum-kernel SVM benchmark toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute the training-partition Gram matrix; writes CSV and a PGM heatmap
    Kernel(BenchArgs),
    /// Full benchmark: preprocess, Gram, train, evaluate; writes report.json and friends
    Run(BenchArgs),
    /// k-fold cross-validation; writes cv.json
    Cv(CvArgs),
    /// Apply a saved model to a feature CSV
    Predict(PredictArgs),
    /// Render an existing report.json as a text table
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Svm,
    Qsvm,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelMode {
    Exact,
    Shots,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionChoice {
    Paper,
    Doubled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LabelChoice {
    M,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StdChoice {
    Population,
    Sample,
}

/// Options shared by the benchmark-style subcommands.
#[derive(Args, Clone, Debug)]
pub struct BenchArgs {
    /// Input CSV (id, diagnosis_result and the eight numeric columns)
    #[arg(long, short = 'i')]
    pub input: PathBuf,

    /// Directory for emitted artifacts
    #[arg(long, short = 'o', default_value = "out")]
    pub output_dir: PathBuf,

    /// Master seed; all randomness derives from it
    #[arg(long, env = "QKSVM_SEED", default_value_t = 42)]
    pub seed: u64,

    /// Which classifier(s) to run
    #[arg(long, value_enum, default_value_t = ModelChoice::Both)]
    pub model: ModelChoice,

    /// RBF gamma; defaults to 1/(feature count)
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Quantum kernel evaluation mode
    #[arg(long, value_enum, default_value_t = KernelMode::Exact)]
    pub kernel_mode: KernelMode,

    /// Shot count for `--kernel-mode shots`
    #[arg(long, default_value_t = 8192)]
    pub shots: u64,

    /// Feature map repetitions
    #[arg(long, default_value_t = 1)]
    pub reps: usize,

    /// Feature map angle convention
    #[arg(long, value_enum, default_value_t = ConventionChoice::Paper)]
    pub convention: ConventionChoice,

    /// Soft-margin penalty C
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,

    /// Solver tolerance
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,

    /// Cap on solver working-set steps
    #[arg(long, default_value_t = 10_000)]
    pub max_passes: usize,

    /// Alphas at or below this are not support vectors
    #[arg(long, default_value_t = 1e-8)]
    pub support_epsilon: f64,

    /// Held-out fraction for the train/test split
    #[arg(long, default_value_t = 0.2)]
    pub test_ratio: f64,

    /// Fit scalers on the training portion only instead of the full set
    #[arg(long)]
    pub fit_on_train_only: bool,

    /// Diagnosis code reported as the positive class
    #[arg(long, value_enum, default_value_t = LabelChoice::B)]
    pub positive_label: LabelChoice,

    /// Clip negative Gram eigenvalues to zero before training
    #[arg(long)]
    pub psd_project: bool,

    /// Rename expected columns: "expected=actual,expected=actual"
    #[arg(long)]
    pub column_map: Option<String>,
}

#[derive(Args, Clone, Debug)]
pub struct CvArgs {
    #[command(flatten)]
    pub bench: BenchArgs,

    /// Number of folds
    #[arg(long, default_value_t = 10)]
    pub folds: usize,

    /// Standard-deviation estimator for the fold scores
    #[arg(long, value_enum, default_value_t = StdChoice::Population)]
    pub cv_std: StdChoice,
}

#[derive(Args, Clone, Debug)]
pub struct PredictArgs {
    /// Saved model JSON from `run`
    #[arg(long)]
    pub model_file: PathBuf,

    /// Feature CSV (id plus the eight numeric columns; no label needed)
    #[arg(long, short = 'i')]
    pub input: PathBuf,

    /// Output CSV path
    #[arg(long, short = 'o', default_value = "predictions.csv")]
    pub output: PathBuf,

    /// Rename expected columns: "expected=actual,expected=actual"
    #[arg(long)]
    pub column_map: Option<String>,
}

#[derive(Args, Clone, Debug)]
pub struct ReportArgs {
    /// Path to a report.json produced by `run`
    pub report: PathBuf,
}

/// Errors carrying the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    NonConvergence(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::NonConvergence(m) | CliError::Internal(m) => {
                write!(f, "{m}")
            }
        }
    }
}

impl From<qksvm::Error> for CliError {
    fn from(e: qksvm::Error) -> Self {
        match e {
            qksvm::Error::EigenNoConvergence(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
