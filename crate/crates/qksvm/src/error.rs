//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {n} out of supported range 1..={max}")]
    QubitCount { n: usize, max: usize },

    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitIndex { qubit: usize, n_qubits: usize },

    #[error("two-qubit gate requires distinct qubits, got ({q}, {q})")]
    SamePair { q: usize },

    #[error("dimension mismatch: {left} vs {right} ({context})")]
    DimensionMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },

    #[error("shot count must be positive")]
    InvalidShots,

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("encoding error: feature vector length {len} does not match {n_qubits} qubits")]
    Encoding { len: usize, n_qubits: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("csv load error at row {row}, column '{column}': {reason}")]
    CsvLoad {
        row: usize,
        column: String,
        reason: String,
    },

    #[error("missing column '{0}' in csv header")]
    MissingColumn(String),

    #[error("labels must be -1 or +1, got {0}")]
    InvalidLabel(i32),

    #[error("dataset contains a single class; {0}")]
    SingleClass(&'static str),

    #[error("test ratio {0} out of range (0, 1)")]
    RatioOutOfRange(f64),

    #[error("fold count {k} out of range 2..={n}")]
    FoldCount { k: usize, n: usize },

    #[error("diagnostic unsupported for this kernel: {0}")]
    UnsupportedDiagnostic(&'static str),

    #[error("eigensolver failed to converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("model file error: {0}")]
    ModelFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
