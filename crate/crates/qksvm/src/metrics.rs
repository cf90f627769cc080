//! Confusion counts, the five benchmark metrics, and k-fold
//! cross-validation. Metrics with a zero denominator are reported as
//! `None` (JSON null) rather than silently coerced to 0 or 1.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svm::LabeledDataset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub positive_label: i8,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Standard counts of `y_pred` against `y_true` relative to
/// `positive_label`.
pub fn confusion(y_true: &[i8], y_pred: &[i8], positive_label: i8) -> Result<ConfusionCounts> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            left: y_true.len(),
            right: y_pred.len(),
            context: "confusion label vectors",
        });
    }
    if positive_label != 1 && positive_label != -1 {
        return Err(Error::InvalidLabel(positive_label as i32));
    }
    let mut counts = ConfusionCounts {
        tp: 0,
        tn: 0,
        fp: 0,
        fn_: 0,
        positive_label,
    };
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t != 1 && t != -1 {
            return Err(Error::InvalidLabel(t as i32));
        }
        if p != 1 && p != -1 {
            return Err(Error::InvalidLabel(p as i32));
        }
        match (t == positive_label, p == positive_label) {
            (true, true) => counts.tp += 1,
            (true, false) => counts.fn_ += 1,
            (false, true) => counts.fp += 1,
            (false, false) => counts.tn += 1,
        }
    }
    Ok(counts)
}

/// The five benchmark metrics; `None` marks an undefined (0/0) value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    if den == 0 {
        None
    } else {
        Some(num as f64 / den as f64)
    }
}

pub fn metric_set(c: &ConfusionCounts) -> Result<MetricSet> {
    let total = c.total();
    if total == 0 {
        return Err(Error::EmptyInput("confusion counts"));
    }
    let precision = ratio(c.tp, c.tp + c.fp);
    let sensitivity = ratio(c.tp, c.tp + c.fn_);
    let f1 = match (precision, sensitivity) {
        (Some(p), Some(s)) if p + s > 0.0 => Some(2.0 * p * s / (p + s)),
        _ => None,
    };
    Ok(MetricSet {
        accuracy: ratio(c.tp + c.tn, total),
        precision,
        sensitivity,
        specificity: ratio(c.tn, c.tn + c.fp),
        f1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdMode {
    Population,
    Sample,
}

impl std::str::FromStr for StdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "population" => Ok(StdMode::Population),
            "sample" => Ok(StdMode::Sample),
            other => Err(Error::Config(format!(
                "unknown std mode '{other}' (expected population|sample)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub seed: u64,
}

/// Seeded-shuffle fold partition: fold sizes differ by at most one, larger
/// folds first. 124 samples over 10 folds gives four 13s then six 12s.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::FoldCount { k, n });
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);

    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut cursor = 0usize;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        folds.push(indices[cursor..cursor + size].to_vec());
        cursor += size;
    }
    Ok(folds)
}

fn mean_and_std(scores: &[f64], mode: StdMode) -> (f64, f64) {
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let ss: f64 = scores.iter().map(|s| (s - mean).powi(2)).sum();
    let denom = match mode {
        StdMode::Population => n,
        StdMode::Sample => (n - 1.0).max(1.0),
    };
    (mean, (ss / denom).sqrt())
}

/// k-fold cross-validation: each fold is scored by a model trained on its
/// complement. Folds are reported in fold order.
pub fn kfold_cross_validate<M>(
    ds: &LabeledDataset,
    k: usize,
    seed: u64,
    std_mode: StdMode,
    train_fn: impl Fn(&LabeledDataset) -> Result<M>,
    score_fn: impl Fn(&M, &LabeledDataset) -> Result<f64>,
) -> Result<CvReport> {
    let folds = kfold_indices(ds.len(), k, seed)?;
    let mut fold_scores = Vec::with_capacity(k);
    for fold in &folds {
        let holdout = ds.subset(fold);
        let train_indices: Vec<usize> = (0..ds.len()).filter(|i| !fold.contains(i)).collect();
        let train = ds.subset(&train_indices);
        let model = train_fn(&train)?;
        fold_scores.push(score_fn(&model, &holdout)?);
    }
    let (mean, std) = mean_and_std(&fold_scores, std_mode);
    Ok(CvReport {
        k,
        fold_scores,
        mean,
        std,
        seed,
    })
}

/// Fraction of matching labels.
pub fn accuracy_score(y_true: &[i8], y_pred: &[i8]) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            left: y_true.len(),
            right: y_pred.len(),
            context: "accuracy label vectors",
        });
    }
    if y_true.is_empty() {
        return Err(Error::EmptyInput("accuracy labels"));
    }
    let hits = y_true.iter().zip(y_pred).filter(|(t, p)| t == p).count();
    Ok(hits as f64 / y_true.len() as f64)
}
