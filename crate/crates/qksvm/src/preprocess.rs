//! Dataset ingestion and the preprocessing pipeline: random oversampling
//! to balance classes, standardization, MinMax scaling and the train/test
//! split.
//!
//! By default the scalers are fitted on the full oversampled set before
//! splitting, which reproduces the published pipeline order; pass
//! `fit_on_train_only` to refit on the training portion instead.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featuremap::FeatureVector;
use crate::svm::LabeledDataset;

/// Numeric feature columns in their fixed encoding order.
pub const FEATURE_NAMES: [&str; 8] = [
    "radius",
    "texture",
    "perimeter",
    "area",
    "smoothness",
    "compactness",
    "symmetry",
    "fractal_dimension",
];

pub const ID_COLUMN: &str = "id";
pub const DIAGNOSIS_COLUMN: &str = "diagnosis_result";

/// Diagnosis code from the source data: M(alignant) or B(enign).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagnosisCode {
    M,
    B,
}

impl FromStr for DiagnosisCode {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.trim() {
            "M" | "m" => Ok(DiagnosisCode::M),
            "B" | "b" => Ok(DiagnosisCode::B),
            _ => Err(()),
        }
    }
}

impl fmt::Display for DiagnosisCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagnosisCode::M => write!(f, "M"),
            DiagnosisCode::B => write!(f, "B"),
        }
    }
}

/// One row of the source CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct RawRecord {
    pub id: String,
    pub features: [f64; 8],
    pub diagnosis: DiagnosisCode,
}

fn resolve_column(
    headers: &csv::StringRecord,
    name: &str,
    column_map: &HashMap<String, String>,
) -> Result<usize> {
    let target = column_map.get(name).map(String::as_str).unwrap_or(name);
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(target))
        .ok_or_else(|| Error::MissingColumn(target.to_string()))
}

/// Load the reference CSV layout. `column_map` renames expected columns to
/// whatever the file actually uses (`expected -> actual`).
pub fn load_csv_with_map(
    path: &Path,
    column_map: &HashMap<String, String>,
) -> Result<Vec<RawRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::CsvLoad {
            row: 0,
            column: String::new(),
            reason: e.to_string(),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::CsvLoad {
            row: 0,
            column: String::new(),
            reason: e.to_string(),
        })?
        .clone();

    let id_idx = resolve_column(&headers, ID_COLUMN, column_map)?;
    let diag_idx = resolve_column(&headers, DIAGNOSIS_COLUMN, column_map)?;
    let feature_idx: Vec<usize> = FEATURE_NAMES
        .iter()
        .map(|name| resolve_column(&headers, name, column_map))
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    for (row_num, row) in reader.records().enumerate() {
        // 1-based data row numbers in error messages
        let row_display = row_num + 1;
        let row = row.map_err(|e| Error::CsvLoad {
            row: row_display,
            column: String::new(),
            reason: e.to_string(),
        })?;
        let field = |idx: usize, column: &str| -> Result<&str> {
            row.get(idx).ok_or_else(|| Error::CsvLoad {
                row: row_display,
                column: column.to_string(),
                reason: "missing field".into(),
            })
        };

        let id = field(id_idx, ID_COLUMN)?.to_string();
        let diag_text = field(diag_idx, DIAGNOSIS_COLUMN)?;
        let diagnosis = DiagnosisCode::from_str(diag_text).map_err(|_| Error::CsvLoad {
            row: row_display,
            column: DIAGNOSIS_COLUMN.to_string(),
            reason: format!("unknown diagnosis code '{diag_text}' (expected M or B)"),
        })?;

        let mut features = [0.0f64; 8];
        for (slot, (&idx, name)) in features
            .iter_mut()
            .zip(feature_idx.iter().zip(FEATURE_NAMES.iter()))
        {
            let text = field(idx, name)?;
            let value: f64 = text.parse().map_err(|_| Error::CsvLoad {
                row: row_display,
                column: name.to_string(),
                reason: format!("unparseable numeric value '{text}'"),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvLoad {
                    row: row_display,
                    column: name.to_string(),
                    reason: "non-finite value".into(),
                });
            }
            *slot = value;
        }
        records.push(RawRecord {
            id,
            features,
            diagnosis,
        });
    }
    Ok(records)
}

/// Load with the default column names.
pub fn load_csv(path: &Path) -> Result<Vec<RawRecord>> {
    load_csv_with_map(path, &HashMap::new())
}

/// Feature-only CSV for prediction: id column plus the eight numerics, no
/// diagnosis required. Returns (ids, feature rows).
pub fn load_features_csv(
    path: &Path,
    column_map: &HashMap<String, String>,
) -> Result<(Vec<String>, Vec<FeatureVector>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::CsvLoad {
            row: 0,
            column: String::new(),
            reason: e.to_string(),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::CsvLoad {
            row: 0,
            column: String::new(),
            reason: e.to_string(),
        })?
        .clone();
    let id_idx = resolve_column(&headers, ID_COLUMN, column_map)?;
    let feature_idx: Vec<usize> = FEATURE_NAMES
        .iter()
        .map(|name| resolve_column(&headers, name, column_map))
        .collect::<Result<_>>()?;

    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (row_num, row) in reader.records().enumerate() {
        let row_display = row_num + 1;
        let row = row.map_err(|e| Error::CsvLoad {
            row: row_display,
            column: String::new(),
            reason: e.to_string(),
        })?;
        ids.push(
            row.get(id_idx)
                .ok_or_else(|| Error::CsvLoad {
                    row: row_display,
                    column: ID_COLUMN.to_string(),
                    reason: "missing field".into(),
                })?
                .to_string(),
        );
        let mut features = Vec::with_capacity(8);
        for (&idx, name) in feature_idx.iter().zip(FEATURE_NAMES.iter()) {
            let text = row.get(idx).ok_or_else(|| Error::CsvLoad {
                row: row_display,
                column: name.to_string(),
                reason: "missing field".into(),
            })?;
            features.push(text.parse::<f64>().map_err(|_| Error::CsvLoad {
                row: row_display,
                column: name.to_string(),
                reason: format!("unparseable numeric value '{text}'"),
            })?);
        }
        rows.push(features);
    }
    Ok((ids, rows))
}

/// Map records to labels: `positive_code` becomes +1, the other code -1.
pub fn to_labeled(records: &[RawRecord], positive_code: DiagnosisCode) -> Result<LabeledDataset> {
    if records.is_empty() {
        return Err(Error::EmptyInput("record list"));
    }
    let x = records.iter().map(|r| r.features.to_vec()).collect();
    let y = records
        .iter()
        .map(|r| if r.diagnosis == positive_code { 1 } else { -1 })
        .collect();
    let ids = records.iter().map(|r| r.id.clone()).collect();
    LabeledDataset::new(x, y, ids)
}

/// Duplicate minority rows (uniformly, with replacement, seeded) until the
/// class counts are equal. Original rows are kept untouched in order;
/// duplicates are appended.
pub fn random_oversample(ds: &LabeledDataset, seed: u64) -> Result<LabeledDataset> {
    let (pos, neg) = ds.class_counts();
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass("oversampling needs both classes"));
    }
    if pos == neg {
        return Ok(ds.clone());
    }
    let minority_label: i8 = if pos < neg { 1 } else { -1 };
    let deficit = pos.abs_diff(neg);
    let minority_indices: Vec<usize> =
        ds.y.iter()
            .enumerate()
            .filter(|(_, &l)| l == minority_label)
            .map(|(i, _)| i)
            .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ds.clone();
    for _ in 0..deficit {
        let pick = minority_indices[rng.gen_range(0..minority_indices.len())];
        out.x.push(ds.x[pick].clone());
        out.y.push(ds.y[pick]);
        out.ids.push(ds.ids[pick].clone());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalerKind {
    Standard,
    MinMax,
}

/// Fitted per-feature scaling statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalerState {
    pub kind: ScalerKind,
    /// Standard: (mean, population std). MinMax: (observed min, observed max).
    pub stats: Vec<(f64, f64)>,
    /// MinMax target range; unused for Standard.
    pub range: (f64, f64),
}

impl ScalerState {
    /// Transform one row.
    pub fn apply_row(&self, row: &[f64]) -> Result<FeatureVector> {
        if row.len() != self.stats.len() {
            return Err(Error::DimensionMismatch {
                left: row.len(),
                right: self.stats.len(),
                context: "scaler feature count",
            });
        }
        let out = row
            .iter()
            .zip(&self.stats)
            .map(|(&v, &(a, b))| match self.kind {
                ScalerKind::Standard => {
                    let std = b;
                    if std > 0.0 {
                        (v - a) / std
                    } else {
                        0.0
                    }
                }
                ScalerKind::MinMax => {
                    let (lo, hi) = self.range;
                    if b > a {
                        (v - a) / (b - a) * (hi - lo) + lo
                    } else {
                        lo
                    }
                }
            })
            .collect();
        Ok(out)
    }

    pub fn apply(&self, rows: &[FeatureVector]) -> Result<Vec<FeatureVector>> {
        rows.iter().map(|r| self.apply_row(r)).collect()
    }
}

/// Fit a standardizer: per-feature mean and population standard deviation.
/// Constant features transform to 0.
pub fn fit_standardize(rows: &[FeatureVector]) -> Result<ScalerState> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("standardize fit set"));
    }
    let dim = rows[0].len();
    let n = rows.len() as f64;
    let mut stats = Vec::with_capacity(dim);
    for d in 0..dim {
        let mean = rows.iter().map(|r| r[d]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[d] - mean).powi(2)).sum::<f64>() / n;
        stats.push((mean, var.sqrt()));
    }
    Ok(ScalerState {
        kind: ScalerKind::Standard,
        stats,
        range: (0.0, 0.0),
    })
}

/// Fit a MinMax scaler onto `range`. Constant features map to the range
/// minimum.
pub fn fit_minmax(rows: &[FeatureVector], range: (f64, f64)) -> Result<ScalerState> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("minmax fit set"));
    }
    if range.0 >= range.1 {
        return Err(Error::Config(format!(
            "minmax range ({}, {}) must be increasing",
            range.0, range.1
        )));
    }
    let dim = rows[0].len();
    let mut stats = Vec::with_capacity(dim);
    for d in 0..dim {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in rows {
            lo = lo.min(r[d]);
            hi = hi.max(r[d]);
        }
        stats.push((lo, hi));
    }
    Ok(ScalerState {
        kind: ScalerKind::MinMax,
        stats,
        range,
    })
}

/// Disjoint train/test index sets from a seeded shuffle; the first
/// `round(ratio * n)` shuffled indices are the test set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

pub fn train_test_split(n_samples: usize, test_ratio: f64, seed: u64) -> Result<SplitIndices> {
    if !(test_ratio > 0.0 && test_ratio < 1.0) {
        return Err(Error::RatioOutOfRange(test_ratio));
    }
    let mut indices: Vec<usize> = (0..n_samples).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let n_test = (test_ratio * n_samples as f64).round() as usize;
    let test = indices[..n_test].to_vec();
    let train = indices[n_test..].to_vec();
    Ok(SplitIndices { train, test, seed })
}

/// Which scaled representation the pipeline should produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingBranch {
    /// Standardize only (classical RBF branch).
    Standardized,
    /// Standardize then MinMax onto [0, 1] (quantum encoding branch).
    MinMaxScaled,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub positive_code: DiagnosisCode,
    pub branch: ScalingBranch,
    pub test_ratio: f64,
    pub oversample_seed: u64,
    pub split_seed: u64,
    pub fit_on_train_only: bool,
}

impl PipelineConfig {
    pub fn new(branch: ScalingBranch) -> Self {
        PipelineConfig {
            positive_code: DiagnosisCode::M,
            branch,
            test_ratio: 0.2,
            oversample_seed: 0,
            split_seed: 1,
            fit_on_train_only: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub scalers: Vec<ScalerState>,
    pub split: SplitIndices,
    /// Size of the dataset after oversampling.
    pub oversampled_len: usize,
}

/// Full preprocessing pipeline: oversample, standardize, MinMax (quantum
/// branch only), split. The split permutation depends only on the seeds
/// and the row count, so the two branches produce aligned partitions.
pub fn run_pipeline(records: &[RawRecord], cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let labeled = to_labeled(records, cfg.positive_code)?;
    let balanced = random_oversample(&labeled, cfg.oversample_seed)?;
    let split = train_test_split(balanced.len(), cfg.test_ratio, cfg.split_seed)?;

    let fit_rows: Vec<FeatureVector> = if cfg.fit_on_train_only {
        split.train.iter().map(|&i| balanced.x[i].clone()).collect()
    } else {
        balanced.x.clone()
    };

    let mut scalers = vec![fit_standardize(&fit_rows)?];
    let mut transformed = scalers[0].apply(&balanced.x)?;
    if cfg.branch == ScalingBranch::MinMaxScaled {
        let fit_standardized = scalers[0].apply(&fit_rows)?;
        let minmax = fit_minmax(&fit_standardized, (0.0, 1.0))?;
        transformed = minmax.apply(&transformed)?;
        scalers.push(minmax);
    }

    let scaled = LabeledDataset::new(transformed, balanced.y.clone(), balanced.ids.clone())?;
    Ok(PipelineOutput {
        train: scaled.subset(&split.train),
        test: scaled.subset(&split.test),
        scalers,
        split,
        oversampled_len: balanced.len(),
    })
}

/// Write a processed split as CSV with the label column in {-1, +1}.
pub fn write_split_csv<W: Write>(mut w: W, ds: &LabeledDataset) -> Result<()> {
    write!(w, "id,label")?;
    for name in FEATURE_NAMES {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for i in 0..ds.len() {
        write!(w, "{},{}", ds.ids[i], ds.y[i])?;
        for v in &ds.x[i] {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as IoWrite;

    fn write_temp_csv(content: &str) -> std::path::PathBuf {
        let mut path = std::env::temp_dir();
        let unique = format!(
            "qksvm-test-{}-{}.csv",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        );
        path.push(unique);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    const HEADER: &str = "id,diagnosis_result,radius,texture,perimeter,area,smoothness,compactness,symmetry,fractal_dimension";

    fn sample_records(n_m: usize, n_b: usize) -> Vec<RawRecord> {
        let mut records = Vec::new();
        for i in 0..(n_m + n_b) {
            let diagnosis = if i < n_m {
                DiagnosisCode::M
            } else {
                DiagnosisCode::B
            };
            let v = i as f64;
            records.push(RawRecord {
                id: format!("r{i}"),
                features: [v, v + 1.0, v * 2.0, v * 3.0, 0.1, 0.2, 0.3, 0.4],
                diagnosis,
            });
        }
        records
    }

    #[test]
    fn load_csv_parses_rows_in_order() {
        let path = write_temp_csv(&format!(
            "{HEADER}\n1,M,23,12,151,954,0.143,0.278,0.242,0.079\n2,B,9,13,133,1326,0.143,0.079,0.181,0.057\n"
        ));
        let records = load_csv(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].id, "1");
        assert_eq!(records[0].diagnosis, DiagnosisCode::M);
        assert_eq!(records[0].features[0], 23.0);
        assert_eq!(records[1].features[3], 1326.0);
    }

    #[test]
    fn load_csv_reports_row_and_column_for_bad_diagnosis() {
        let path = write_temp_csv(&format!(
            "{HEADER}\n1,M,1,1,1,1,1,1,1,1\n2,X,1,1,1,1,1,1,1,1\n"
        ));
        let err = load_csv(&path).unwrap_err();
        std::fs::remove_file(&path).ok();
        match err {
            Error::CsvLoad { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, DIAGNOSIS_COLUMN);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_csv_reports_unparseable_numeric() {
        let path = write_temp_csv(&format!("{HEADER}\n1,M,1,1,oops,1,1,1,1,1\n"));
        let err = load_csv(&path).unwrap_err();
        std::fs::remove_file(&path).ok();
        match err {
            Error::CsvLoad { row, column, .. } => {
                assert_eq!(row, 1);
                assert_eq!(column, "perimeter");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_csv_header_only_is_empty() {
        let path = write_temp_csv(&format!("{HEADER}\n"));
        let records = load_csv(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert!(records.is_empty());
    }

    #[test]
    fn load_csv_missing_column_is_an_error() {
        let path = write_temp_csv("id,diagnosis_result,radius\n1,M,5\n");
        let err = load_csv(&path).unwrap_err();
        std::fs::remove_file(&path).ok();
        assert!(matches!(err, Error::MissingColumn(_)));
    }

    #[test]
    fn column_map_renames_headers() {
        let header = HEADER.replace("diagnosis_result", "outcome");
        let path = write_temp_csv(&format!("{header}\n1,M,1,2,3,4,5,6,7,8\n"));
        let mut map = HashMap::new();
        map.insert("diagnosis_result".to_string(), "outcome".to_string());
        let records = load_csv_with_map(&path, &map).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].diagnosis, DiagnosisCode::M);
    }

    #[test]
    fn to_labeled_maps_positive_code() {
        let records = sample_records(2, 1);
        let ds = to_labeled(&records, DiagnosisCode::M).unwrap();
        assert_eq!(ds.y, vec![1, 1, -1]);
        let ds = to_labeled(&records, DiagnosisCode::B).unwrap();
        assert_eq!(ds.y, vec![-1, -1, 1]);
    }

    #[test]
    fn oversample_balances_and_keeps_originals() {
        let records = sample_records(62, 38);
        let ds = to_labeled(&records, DiagnosisCode::M).unwrap();
        let balanced = random_oversample(&ds, 7).unwrap();
        assert_eq!(balanced.len(), 124);
        let (pos, neg) = balanced.class_counts();
        assert_eq!(pos, 62);
        assert_eq!(neg, 62);
        // originals intact and in order
        for i in 0..100 {
            assert_eq!(balanced.ids[i], ds.ids[i]);
            assert_eq!(balanced.x[i], ds.x[i]);
        }
        // duplicates come from the minority class
        for i in 100..124 {
            assert_eq!(balanced.y[i], -1);
        }
    }

    #[test]
    fn oversample_is_deterministic_and_noop_when_balanced() {
        let records = sample_records(5, 3);
        let ds = to_labeled(&records, DiagnosisCode::M).unwrap();
        let a = random_oversample(&ds, 99).unwrap();
        let b = random_oversample(&ds, 99).unwrap();
        assert_eq!(a, b);
        let c = random_oversample(&ds, 100).unwrap();
        assert_eq!(c.len(), a.len());

        let balanced = to_labeled(&sample_records(4, 4), DiagnosisCode::M).unwrap();
        assert_eq!(random_oversample(&balanced, 1).unwrap(), balanced);
    }

    #[test]
    fn oversample_rejects_single_class() {
        let ds = to_labeled(&sample_records(3, 0), DiagnosisCode::M).unwrap();
        assert!(matches!(
            random_oversample(&ds, 0),
            Err(Error::SingleClass(_))
        ));
    }

    #[test]
    fn standardize_matches_population_formula() {
        let rows = vec![vec![2.0], vec![4.0], vec![6.0]];
        let scaler = fit_standardize(&rows).unwrap();
        let out = scaler.apply(&rows).unwrap();
        let expect = 2.0 / (8.0f64 / 3.0).sqrt();
        assert!((out[0][0] + expect).abs() < 1e-12);
        assert!(out[1][0].abs() < 1e-12);
        assert!((out[2][0] - expect).abs() < 1e-12);
        // frozen value of the expression above
        assert!((out[2][0] - 1.224_744_871_391_589).abs() < 1e-12);

        let mean: f64 = out.iter().map(|r| r[0]).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-10);
    }

    #[test]
    fn standardized_columns_have_zero_mean_unit_std() {
        // deterministic pseudo-random fit set
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0 - 5.0
        };
        let rows: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| next()).collect()).collect();
        let scaler = fit_standardize(&rows).unwrap();
        let out = scaler.apply(&rows).unwrap();
        for d in 0..3 {
            let mean = out.iter().map(|r| r[d]).sum::<f64>() / 40.0;
            let var = out.iter().map(|r| (r[d] - mean).powi(2)).sum::<f64>() / 40.0;
            assert!(mean.abs() <= 1e-10, "column {d} mean {mean}");
            assert!(
                (var.sqrt() - 1.0).abs() <= 1e-10,
                "column {d} std {}",
                var.sqrt()
            );
        }
    }

    #[test]
    fn standardize_constant_feature_maps_to_zero() {
        let rows = vec![vec![5.0, 1.0], vec![5.0, 2.0], vec![5.0, 3.0]];
        let scaler = fit_standardize(&rows).unwrap();
        let out = scaler.apply(&rows).unwrap();
        for r in &out {
            assert_eq!(r[0], 0.0);
        }
    }

    #[test]
    fn minmax_hits_range_endpoints() {
        let rows = vec![vec![2.0], vec![4.0], vec![6.0]];
        let scaler = fit_minmax(&rows, (0.0, 1.0)).unwrap();
        let out = scaler.apply(&rows).unwrap();
        assert_eq!(out[0][0], 0.0);
        assert!((out[1][0] - 0.5).abs() < 1e-15);
        assert_eq!(out[2][0], 1.0);

        let wide = fit_minmax(&rows, (0.0, 2.0)).unwrap();
        let out = wide.apply(&rows).unwrap();
        assert_eq!(out[0][0], 0.0);
        assert!((out[1][0] - 1.0).abs() < 1e-15);
        assert_eq!(out[2][0], 2.0);
    }

    #[test]
    fn minmax_constant_feature_maps_to_minimum() {
        let rows = vec![vec![3.0], vec![3.0]];
        let scaler = fit_minmax(&rows, (0.0, 1.0)).unwrap();
        let out = scaler.apply(&rows).unwrap();
        assert_eq!(out[0][0], 0.0);
        assert_eq!(out[1][0], 0.0);
    }

    #[test]
    fn split_counts_and_determinism() {
        let split = train_test_split(124, 0.2, 3).unwrap();
        assert_eq!(split.test.len(), 25);
        assert_eq!(split.train.len(), 99);
        let again = train_test_split(124, 0.2, 3).unwrap();
        assert_eq!(split, again);

        let half = train_test_split(4, 0.5, 1).unwrap();
        assert_eq!(half.test.len(), 2);
        assert_eq!(half.train.len(), 2);

        // disjoint cover
        let mut all: Vec<usize> = split.train.iter().chain(&split.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..124).collect::<Vec<_>>());
    }

    #[test]
    fn split_rejects_bad_ratio() {
        assert!(train_test_split(10, 0.0, 1).is_err());
        assert!(train_test_split(10, 1.0, 1).is_err());
        assert!(train_test_split(10, -0.1, 1).is_err());
    }

    #[test]
    fn pipeline_counts_and_ranges() {
        let records = sample_records(62, 38);
        let cfg = PipelineConfig::new(ScalingBranch::MinMaxScaled);
        let out = run_pipeline(&records, &cfg).unwrap();
        assert_eq!(out.oversampled_len, 124);
        assert_eq!(out.train.len(), 99);
        assert_eq!(out.test.len(), 25);
        assert_eq!(out.scalers.len(), 2);
        for row in out.train.x.iter().chain(out.test.x.iter()) {
            for &v in row {
                assert!(
                    (-1e-12..=1.0 + 1e-12).contains(&v),
                    "value {v} out of range"
                );
            }
        }
    }

    #[test]
    fn pipeline_svm_branch_is_standardized_only() {
        let records = sample_records(10, 6);
        let cfg = PipelineConfig::new(ScalingBranch::Standardized);
        let out = run_pipeline(&records, &cfg).unwrap();
        assert_eq!(out.scalers.len(), 1);
        // standardized features are not confined to [0, 1]
        let any_negative = out
            .train
            .x
            .iter()
            .chain(out.test.x.iter())
            .any(|row| row.iter().any(|&v| v < 0.0));
        assert!(any_negative);
    }

    #[test]
    fn pipeline_is_deterministic() {
        let records = sample_records(20, 12);
        let cfg = PipelineConfig::new(ScalingBranch::MinMaxScaled);
        let a = run_pipeline(&records, &cfg).unwrap();
        let b = run_pipeline(&records, &cfg).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
    }

    #[test]
    fn fit_on_train_only_can_leave_range() {
        let records = sample_records(20, 12);
        let cfg = PipelineConfig {
            fit_on_train_only: true,
            ..PipelineConfig::new(ScalingBranch::MinMaxScaled)
        };
        let out = run_pipeline(&records, &cfg).unwrap();
        // train rows are confined to [0, 1] by construction
        for row in &out.train.x {
            for &v in row {
                assert!((0.0..=1.0).contains(&v));
            }
        }
        // test rows may leave the range; nothing to assert beyond finiteness
        for row in &out.test.x {
            for &v in row {
                assert!(v.is_finite());
            }
        }
    }

    #[test]
    fn split_csv_has_label_column() {
        let ds = to_labeled(&sample_records(2, 1), DiagnosisCode::M).unwrap();
        let mut buf = Vec::new();
        write_split_csv(&mut buf, &ds).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            format!("id,label,{}", FEATURE_NAMES.join(","))
        );
        assert!(lines.next().unwrap().starts_with("r0,1,"));
    }
}
