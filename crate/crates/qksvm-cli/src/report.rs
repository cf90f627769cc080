//! Report document written by `run` and rendered by `report`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qksvm::kernel::{KernelConfig, PsdDiagnostics};
use qksvm::metrics::{ConfusionCounts, CvReport, MetricSet};
use qksvm::svm::TrainDiagnostics;

use crate::context::ConfigEcho;

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub records: usize,
    pub oversampled: usize,
    pub train: usize,
    pub test: usize,
    pub positive_count: usize,
    pub negative_count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalBlock {
    pub confusion: ConfusionCounts,
    pub metrics: MetricSet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelReport {
    pub kernel: KernelConfig,
    pub gram_diagnostics: PsdDiagnostics,
    pub train_diagnostics: TrainDiagnostics,
    pub support_count: usize,
    pub train: EvalBlock,
    pub test: EvalBlock,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ModelReports {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qsvm: Option<ModelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svm: Option<ModelReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub format_version: u32,
    pub config: ConfigEcho,
    pub dataset: DatasetSummary,
    pub models: ModelReports,
    /// Wall-clock seconds; the only fields expected to differ between
    /// reruns of the same configuration.
    pub timings: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CvDocument {
    pub format_version: u32,
    pub config: ConfigEcho,
    pub folds: usize,
    pub std_mode: String,
    pub models: BTreeMap<String, CvReport>,
}

fn pct(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{:.2}", v * 100.0),
        None => "n/a".to_string(),
    }
}

/// Render the benchmark table, one row per classifier and split.
pub fn render_table(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12}{:<8}{:>10}{:>11}{:>13}{:>13}{:>10}\n",
        "Classifier", "Split", "Accuracy", "Precision", "Sensitivity", "Specificity", "F1-Score"
    ));
    let mut push_rows = |name: &str, m: &ModelReport| {
        for (split, block) in [("Train", &m.train), ("Test", &m.test)] {
            out.push_str(&format!(
                "{:<12}{:<8}{:>10}{:>11}{:>13}{:>13}{:>10}\n",
                name,
                split,
                pct(block.metrics.accuracy),
                pct(block.metrics.precision),
                pct(block.metrics.sensitivity),
                pct(block.metrics.specificity),
                pct(block.metrics.f1),
            ));
        }
    };
    if let Some(m) = &report.models.qsvm {
        push_rows("QSVM", m);
    }
    if let Some(m) = &report.models.svm {
        push_rows("SVM", m);
    }
    out
}

pub fn render_details(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    let d = &report.dataset;
    out.push_str(&format!(
        "dataset: {} records -> {} after oversampling ({}+/{}-) -> {} train / {} test\n",
        d.records, d.oversampled, d.positive_count, d.negative_count, d.train, d.test
    ));
    for (name, m) in [("qsvm", &report.models.qsvm), ("svm", &report.models.svm)] {
        if let Some(m) = m {
            out.push_str(&format!(
                "{name}: kernel={} support_vectors={} converged={} dual_objective={:.6} min_eig={:.3e}\n",
                m.kernel.kind_name(),
                m.support_count,
                m.train_diagnostics.converged,
                m.train_diagnostics.dual_objective,
                m.gram_diagnostics.min_eigenvalue,
            ));
        }
    }
    out
}

/// Flat CSV of the metric table for spreadsheets.
pub fn metrics_csv(report: &BenchmarkReport) -> String {
    let mut out =
        String::from("model,split,accuracy,precision,sensitivity,specificity,f1,tp,tn,fp,fn\n");
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for (name, m) in [("qsvm", &report.models.qsvm), ("svm", &report.models.svm)] {
        if let Some(m) = m {
            for (split, block) in [("train", &m.train), ("test", &m.test)] {
                let c = &block.confusion;
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    name,
                    split,
                    cell(block.metrics.accuracy),
                    cell(block.metrics.precision),
                    cell(block.metrics.sensitivity),
                    cell(block.metrics.specificity),
                    cell(block.metrics.f1),
                    c.tp,
                    c.tn,
                    c.fp,
                    c.fn_,
                ));
            }
        }
    }
    out
}

/// 2x2 confusion table as CSV.
pub fn confusion_csv(c: &ConfusionCounts) -> String {
    format!(
        ",predicted_positive,predicted_negative\nactual_positive,{},{}\nactual_negative,{},{}\n",
        c.tp, c.fn_, c.fp, c.tn
    )
}
