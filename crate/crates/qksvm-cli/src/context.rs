//! Shared wiring between the subcommands: config echo, seed fan-out,
//! record loading, and the saved-model bundle format.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qksvm::derive_seed;
use qksvm::featuremap::{AngleConvention, FeatureMapConfig};
use qksvm::kernel::KernelConfig;
use qksvm::preprocess::{
    self, DiagnosisCode, PipelineConfig, RawRecord, ScalerState, ScalingBranch, FEATURE_NAMES,
};
use qksvm::svm::{ModelFile, SvmParams};

use crate::args::{BenchArgs, CliError, ConventionChoice, KernelMode, LabelChoice, ModelChoice};

/// Seed streams derived from the master seed. One knob, fixed fan-out.
pub const STREAM_OVERSAMPLE: u64 = 1;
pub const STREAM_SPLIT: u64 = 2;
pub const STREAM_SHOTS: u64 = 3;
pub const STREAM_CV: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Qsvm,
    Svm,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Qsvm => "qsvm",
            ModelKind::Svm => "svm",
        }
    }
}

pub fn selected_models(choice: ModelChoice) -> Vec<ModelKind> {
    match choice {
        ModelChoice::Qsvm => vec![ModelKind::Qsvm],
        ModelChoice::Svm => vec![ModelKind::Svm],
        ModelChoice::Both => vec![ModelKind::Qsvm, ModelKind::Svm],
    }
}

pub fn parse_column_map(spec: Option<&str>) -> Result<HashMap<String, String>, CliError> {
    let mut map = HashMap::new();
    let Some(spec) = spec else {
        return Ok(map);
    };
    for pair in spec.split(',').filter(|p| !p.trim().is_empty()) {
        let mut it = pair.splitn(2, '=');
        let expected = it.next().unwrap_or("").trim();
        let actual = it.next().unwrap_or("").trim();
        if expected.is_empty() || actual.is_empty() {
            return Err(CliError::Input(format!(
                "malformed --column-map entry '{pair}' (want expected=actual)"
            )));
        }
        let known = expected == preprocess::ID_COLUMN
            || expected == preprocess::DIAGNOSIS_COLUMN
            || FEATURE_NAMES.contains(&expected);
        if !known {
            return Err(CliError::Input(format!(
                "--column-map references unknown column '{expected}'"
            )));
        }
        map.insert(expected.to_string(), actual.to_string());
    }
    Ok(map)
}

pub fn load_records(args: &BenchArgs) -> Result<Vec<RawRecord>, CliError> {
    let map = parse_column_map(args.column_map.as_deref())?;
    if !args.input.exists() {
        return Err(CliError::Input(format!(
            "input file not found: {}",
            args.input.display()
        )));
    }
    let records = preprocess::load_csv_with_map(&args.input, &map)?;
    if records.is_empty() {
        eprintln!("warning: input file has a header but no data rows");
    }
    Ok(records)
}

pub fn positive_code(label: LabelChoice) -> DiagnosisCode {
    match label {
        LabelChoice::M => DiagnosisCode::M,
        LabelChoice::B => DiagnosisCode::B,
    }
}

pub fn pipeline_config(args: &BenchArgs, model: ModelKind) -> PipelineConfig {
    let branch = match model {
        ModelKind::Qsvm => ScalingBranch::MinMaxScaled,
        ModelKind::Svm => ScalingBranch::Standardized,
    };
    PipelineConfig {
        positive_code: positive_code(args.positive_label),
        branch,
        test_ratio: args.test_ratio,
        oversample_seed: derive_seed(args.seed, STREAM_OVERSAMPLE),
        split_seed: derive_seed(args.seed, STREAM_SPLIT),
        fit_on_train_only: args.fit_on_train_only,
    }
}

pub fn feature_map(args: &BenchArgs) -> FeatureMapConfig {
    let convention = match args.convention {
        ConventionChoice::Paper => AngleConvention::Paper,
        ConventionChoice::Doubled => AngleConvention::Doubled,
    };
    FeatureMapConfig::full(FEATURE_NAMES.len())
        .with_reps(args.reps)
        .with_convention(convention)
}

pub fn resolved_gamma(args: &BenchArgs) -> f64 {
    args.gamma.unwrap_or(1.0 / FEATURE_NAMES.len() as f64)
}

pub fn kernel_config(args: &BenchArgs, model: ModelKind) -> KernelConfig {
    match model {
        ModelKind::Svm => KernelConfig::Rbf {
            gamma: resolved_gamma(args),
        },
        ModelKind::Qsvm => match args.kernel_mode {
            KernelMode::Exact => KernelConfig::QuantumExact {
                feature_map: feature_map(args),
            },
            KernelMode::Shots => KernelConfig::QuantumShots {
                feature_map: feature_map(args),
                shots: args.shots,
                master_seed: derive_seed(args.seed, STREAM_SHOTS),
            },
        },
    }
}

pub fn svm_params(args: &BenchArgs) -> SvmParams {
    SvmParams {
        c: args.c,
        tol: args.tol,
        max_passes: args.max_passes,
        support_epsilon: args.support_epsilon,
    }
}

/// Everything that affects results, echoed into every report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    pub model: String,
    pub seed: u64,
    pub gamma: f64,
    pub kernel_mode: String,
    pub shots: u64,
    pub reps: usize,
    pub convention: String,
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
    pub support_epsilon: f64,
    pub test_ratio: f64,
    pub fit_on_train_only: bool,
    pub positive_label: String,
    pub psd_project: bool,
    pub column_map: Option<String>,
}

pub fn config_echo(args: &BenchArgs) -> ConfigEcho {
    ConfigEcho {
        input: args.input.display().to_string(),
        model: format!("{:?}", args.model).to_lowercase(),
        seed: args.seed,
        gamma: resolved_gamma(args),
        kernel_mode: format!("{:?}", args.kernel_mode).to_lowercase(),
        shots: args.shots,
        reps: args.reps,
        convention: format!("{:?}", args.convention).to_lowercase(),
        c: args.c,
        tol: args.tol,
        max_passes: args.max_passes,
        support_epsilon: args.support_epsilon,
        test_ratio: args.test_ratio,
        fit_on_train_only: args.fit_on_train_only,
        positive_label: format!("{:?}", args.positive_label),
        psd_project: args.psd_project,
        column_map: args.column_map.clone(),
    }
}

/// Saved-model file: the versioned model document plus the fitted scalers
/// and label convention needed to apply it to raw feature rows.
#[derive(Serialize, Deserialize)]
pub struct ModelBundle {
    #[serde(flatten)]
    pub model: ModelFile,
    pub scalers: Vec<ScalerState>,
    pub positive_label: String,
}

pub fn load_bundle(path: &Path) -> Result<ModelBundle, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read model file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed model file {}: {e}", path.display())))
}
