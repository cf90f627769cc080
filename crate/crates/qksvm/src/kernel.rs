//! Classical RBF and quantum fidelity kernels, Gram assembly, and
//! structural validation of the resulting matrices.
//!
//! Pair evaluations are pure, so Gram assembly parallelizes over unordered
//! pairs when the `parallel` feature is enabled. Results are identical
//! under any schedule: exact kernels are pure arithmetic, and the shot
//! estimator derives its per-pair seed from (master_seed, min(i,j),
//! max(i,j)) with a fixed mixing function.

use std::io::Write;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featuremap::{
    apply_gates, encoding_gates, inverse_gates, prepare_state, FeatureMapConfig, FeatureVector,
};
use crate::linalg;
use crate::matrix::Matrix;
use crate::statevector::StateVector;

/// Kernel selection plus everything needed to recompute it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelConfig {
    /// Plain dot product. Exists for diagnostics such as weight recovery;
    /// the benchmark models use `Rbf` and the quantum kinds.
    Linear,
    Rbf {
        gamma: f64,
    },
    QuantumExact {
        feature_map: FeatureMapConfig,
    },
    QuantumShots {
        feature_map: FeatureMapConfig,
        shots: u64,
        master_seed: u64,
    },
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelConfig::Linear => Ok(()),
            KernelConfig::Rbf { gamma } => {
                if !gamma.is_finite() || *gamma <= 0.0 {
                    Err(Error::Config(format!(
                        "rbf gamma must be positive, got {gamma}"
                    )))
                } else {
                    Ok(())
                }
            }
            KernelConfig::QuantumExact { feature_map } => feature_map.validate(),
            KernelConfig::QuantumShots {
                feature_map, shots, ..
            } => {
                if *shots == 0 {
                    return Err(Error::InvalidShots);
                }
                feature_map.validate()
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            KernelConfig::Linear => "linear",
            KernelConfig::Rbf { .. } => "rbf",
            KernelConfig::QuantumExact { .. } => "quantum_exact",
            KernelConfig::QuantumShots { .. } => "quantum_shots",
        }
    }

    fn expected_dim(&self) -> Option<usize> {
        match self {
            KernelConfig::QuantumExact { feature_map }
            | KernelConfig::QuantumShots { feature_map, .. } => Some(feature_map.n_qubits),
            _ => None,
        }
    }
}

/// Gram matrix with its provenance and sample identifiers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    values: Matrix,
    provenance: KernelConfig,
    row_ids: Vec<String>,
}

/// Structural health of a Gram matrix.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PsdDiagnostics {
    pub min_eigenvalue: f64,
    pub symmetry_error: f64,
}

impl KernelMatrix {
    pub fn new(values: Matrix, provenance: KernelConfig, row_ids: Vec<String>) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::NotSquare {
                rows: values.rows(),
                cols: values.cols(),
            });
        }
        if row_ids.len() != values.rows() {
            return Err(Error::DimensionMismatch {
                left: row_ids.len(),
                right: values.rows(),
                context: "row ids vs matrix size",
            });
        }
        Ok(KernelMatrix {
            values,
            provenance,
            row_ids,
        })
    }

    pub fn size(&self) -> usize {
        self.values.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn provenance(&self) -> &KernelConfig {
        &self.provenance
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    /// Replace the default index ids with sample identifiers.
    pub fn set_row_ids(&mut self, row_ids: Vec<String>) -> Result<()> {
        if row_ids.len() != self.size() {
            return Err(Error::DimensionMismatch {
                left: row_ids.len(),
                right: self.size(),
                context: "row ids vs matrix size",
            });
        }
        self.row_ids = row_ids;
        Ok(())
    }

    /// Smallest eigenvalue and worst symmetry violation.
    pub fn psd_diagnostics(&self) -> Result<PsdDiagnostics> {
        psd_diagnostics(&self.values)
    }

    /// Clip negative eigenvalues to zero and reconstitute the matrix.
    /// Intended for shot-estimated Grams where sampling noise can push a
    /// few eigenvalues slightly below zero.
    pub fn psd_project(&mut self) -> Result<()> {
        let eig = linalg::symmetric_eigen(&self.values)?;
        let n = self.size();
        let mut projected = Matrix::zeros(n, n);
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            let lambda = lambda.max(0.0);
            if lambda == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = eig.eigenvectors.get(i, k);
                if vik == 0.0 {
                    continue;
                }
                for j in i..n {
                    let add = lambda * vik * eig.eigenvectors.get(j, k);
                    projected.set(i, j, projected.get(i, j) + add);
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                projected.set(j, i, projected.get(i, j));
            }
        }
        self.values = projected;
        Ok(())
    }

    /// CSV export: header `id,<id...>`, one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "id")?;
        for id in &self.row_ids {
            write!(w, ",{id}")?;
        }
        writeln!(w)?;
        for (i, id) in self.row_ids.iter().enumerate() {
            write!(w, "{id}")?;
            for j in 0..self.size() {
                write!(w, ",{}", self.values.get(i, j))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Plain PGM (P2) heatmap: kernel value 0 maps to black, 1 to white.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.size();
        writeln!(w, "P2")?;
        writeln!(w, "{n} {n}")?;
        writeln!(w, "255")?;
        for i in 0..n {
            let mut line = String::with_capacity(n * 4);
            for j in 0..n {
                let v = self.values.get(i, j).clamp(0.0, 1.0);
                let gray = (v * 255.0).round() as u32;
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&gray.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

fn check_same_len(xi: &[f64], xj: &[f64]) -> Result<()> {
    if xi.len() != xj.len() {
        return Err(Error::DimensionMismatch {
            left: xi.len(),
            right: xj.len(),
            context: "kernel input lengths",
        });
    }
    Ok(())
}

/// Dot product kernel.
pub fn linear_kernel(xi: &[f64], xj: &[f64]) -> Result<f64> {
    check_same_len(xi, xj)?;
    Ok(xi.iter().zip(xj).map(|(a, b)| a * b).sum())
}

/// exp(-gamma ||xi - xj||^2); gamma = 1/(2 sigma^2).
pub fn rbf_kernel(xi: &[f64], xj: &[f64], gamma: f64) -> Result<f64> {
    check_same_len(xi, xj)?;
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Config(format!(
            "rbf gamma must be positive, got {gamma}"
        )));
    }
    let dist_sqr: f64 = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-gamma * dist_sqr).exp())
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Fidelity kernel |<psi(xi)|psi(xj)>|^2, computed from the two encoded
/// statevectors.
pub fn quantum_kernel_exact(xi: &[f64], xj: &[f64], fm: &FeatureMapConfig) -> Result<f64> {
    check_same_len(xi, xj)?;
    let a = prepare_state(xi, fm)?;
    let b = prepare_state(xj, fm)?;
    Ok(clamp_unit(a.inner_product(&b)?.norm_sqr()))
}

/// Composed adjoint circuit for a pair: encode xi, then apply the exact
/// inverse of the xj encoding.
fn composed_adjoint_state(xi: &[f64], xj: &[f64], fm: &FeatureMapConfig) -> Result<StateVector> {
    check_same_len(xi, xj)?;
    let mut state = StateVector::zero_state(fm.n_qubits)?;
    apply_gates(&mut state, &encoding_gates(xi, fm)?)?;
    apply_gates(&mut state, &inverse_gates(&encoding_gates(xj, fm)?))?;
    Ok(state)
}

/// Exact all-zeros probability of the adjoint circuit. Equals
/// `quantum_kernel_exact` up to floating-point noise; kept as a second
/// algebraic route for validation.
pub fn quantum_kernel_adjoint_exact(xi: &[f64], xj: &[f64], fm: &FeatureMapConfig) -> Result<f64> {
    Ok(clamp_unit(
        composed_adjoint_state(xi, xj, fm)?.all_zero_probability(),
    ))
}

/// Shot-based kernel estimate: sample the adjoint circuit and report the
/// all-zeros frequency.
pub fn quantum_kernel_shots(
    xi: &[f64],
    xj: &[f64],
    fm: &FeatureMapConfig,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidShots);
    }
    let state = composed_adjoint_state(xi, xj, fm)?;
    let counts = state.sample_measurements(shots, seed)?;
    Ok(counts.frequency(0))
}

/// Fixed SplitMix64-based mixing of (master_seed, min(i,j), max(i,j)) into
/// a per-pair sampling seed. Keeping this one function fixed is what makes
/// shot-mode Grams independent of evaluation order.
pub fn derive_pair_seed(master_seed: u64, i: usize, j: usize) -> u64 {
    let (lo, hi) = if i <= j {
        (i as u64, j as u64)
    } else {
        (j as u64, i as u64)
    };
    let mut z = master_seed;
    for word in [lo, hi] {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(word);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

fn check_dataset(x: &[FeatureVector], cfg: &KernelConfig) -> Result<()> {
    cfg.validate()?;
    if x.is_empty() {
        return Err(Error::EmptyInput("kernel input set"));
    }
    let dim = cfg.expected_dim().unwrap_or(x[0].len());
    for row in x {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                left: row.len(),
                right: dim,
                context: "feature vector dimension",
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "feature vector",
            });
        }
    }
    Ok(())
}

/// Kernel value for one pair under any configuration. Quantum pairs are
/// evaluated from pre-encoded states where possible; this entry point is
/// for callers outside the Gram path.
pub fn kernel_value(xi: &[f64], xj: &[f64], cfg: &KernelConfig, i: usize, j: usize) -> Result<f64> {
    match cfg {
        KernelConfig::Linear => linear_kernel(xi, xj),
        KernelConfig::Rbf { gamma } => rbf_kernel(xi, xj, *gamma),
        KernelConfig::QuantumExact { feature_map } => quantum_kernel_exact(xi, xj, feature_map),
        KernelConfig::QuantumShots {
            feature_map,
            shots,
            master_seed,
        } => quantum_kernel_shots(
            xi,
            xj,
            feature_map,
            *shots,
            derive_pair_seed(*master_seed, i, j),
        ),
    }
}

enum PreparedKernel<'a> {
    Plain(&'a KernelConfig),
    Quantum {
        states: Vec<StateVector>,
        fm: &'a FeatureMapConfig,
        shots: Option<(u64, u64)>,
    },
}

fn prepare_states(x: &[FeatureVector], fm: &FeatureMapConfig) -> Result<Vec<StateVector>> {
    #[cfg(feature = "parallel")]
    {
        x.par_iter().map(|row| prepare_state(row, fm)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        x.iter().map(|row| prepare_state(row, fm)).collect()
    }
}

fn prepare_states_seq(x: &[FeatureVector], fm: &FeatureMapConfig) -> Result<Vec<StateVector>> {
    x.iter().map(|row| prepare_state(row, fm)).collect()
}

impl<'a> PreparedKernel<'a> {
    fn build(x: &[FeatureVector], cfg: &'a KernelConfig, sequential: bool) -> Result<Self> {
        match cfg {
            KernelConfig::QuantumExact { feature_map } => Ok(PreparedKernel::Quantum {
                states: if sequential {
                    prepare_states_seq(x, feature_map)?
                } else {
                    prepare_states(x, feature_map)?
                },
                fm: feature_map,
                shots: None,
            }),
            KernelConfig::QuantumShots {
                feature_map,
                shots,
                master_seed,
            } => Ok(PreparedKernel::Quantum {
                states: if sequential {
                    prepare_states_seq(x, feature_map)?
                } else {
                    prepare_states(x, feature_map)?
                },
                fm: feature_map,
                shots: Some((*shots, *master_seed)),
            }),
            other => Ok(PreparedKernel::Plain(other)),
        }
    }

    fn pair(&self, x: &[FeatureVector], xj: &[f64], i: usize, j: usize) -> Result<f64> {
        match self {
            PreparedKernel::Plain(cfg) => kernel_value(&x[i], xj, cfg, i, j),
            PreparedKernel::Quantum { states, fm, shots } => match shots {
                None => Ok(clamp_unit(states[i].inner_product(&states[j])?.norm_sqr())),
                Some((shots, master_seed)) => {
                    // adjoint route: take the cached encoded state of x_i and
                    // un-encode x_j on a copy
                    let mut state = states[i].clone();
                    apply_gates(&mut state, &inverse_gates(&encoding_gates(xj, fm)?))?;
                    let seed = derive_pair_seed(*master_seed, i, j);
                    Ok(state.sample_measurements(*shots, seed)?.frequency(0))
                }
            },
        }
    }
}

fn assemble_gram(
    x: &[FeatureVector],
    cfg: &KernelConfig,
    pair_values: Vec<((usize, usize), f64)>,
) -> Result<KernelMatrix> {
    let n = x.len();
    let mut values = Matrix::zeros(n, n);
    // diagonal is analytically 1 for rbf and the quantum fidelity kernels;
    // linear keeps the honest dot product
    for (i, row) in x.iter().enumerate() {
        let diag = match cfg {
            KernelConfig::Linear => linear_kernel(row, row)?,
            _ => 1.0,
        };
        values.set(i, i, diag);
    }
    for ((i, j), v) in pair_values {
        values.set(i, j, v);
        values.set(j, i, v);
    }
    let row_ids = (0..n).map(|i| i.to_string()).collect();
    KernelMatrix::new(values, cfg.clone(), row_ids)
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Symmetric Gram matrix over `x`. Each unordered pair is computed once
/// and mirrored. With the `parallel` feature this fans the pair list out
/// over a rayon pool; values are bit-identical to the sequential path.
pub fn gram_matrix(x: &[FeatureVector], cfg: &KernelConfig) -> Result<KernelMatrix> {
    check_dataset(x, cfg)?;
    let prepared = PreparedKernel::build(x, cfg, false)?;
    let pairs = upper_pairs(x.len());

    #[cfg(feature = "parallel")]
    let pair_values: Result<Vec<_>> = pairs
        .par_iter()
        .map(|&(i, j)| prepared.pair(x, &x[j], i, j).map(|v| ((i, j), v)))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let pair_values: Result<Vec<_>> = pairs
        .iter()
        .map(|&(i, j)| prepared.pair(x, &x[j], i, j).map(|v| ((i, j), v)))
        .collect();

    assemble_gram(x, cfg, pair_values?)
}

/// Sequential Gram assembly. Always available; used as the baseline in the
/// benchmark suite and for single-threaded timing runs.
pub fn gram_matrix_seq(x: &[FeatureVector], cfg: &KernelConfig) -> Result<KernelMatrix> {
    check_dataset(x, cfg)?;
    let prepared = PreparedKernel::build(x, cfg, true)?;
    let mut pair_values = Vec::with_capacity(x.len() * (x.len() - 1) / 2);
    for (i, j) in upper_pairs(x.len()) {
        pair_values.push(((i, j), prepared.pair(x, &x[j], i, j)?));
    }
    assemble_gram(x, cfg, pair_values)
}

/// Rectangular kernel block K(eval_i, train_j). No symmetry or diagonal
/// handling; every entry is computed honestly.
pub fn cross_gram(
    x_eval: &[FeatureVector],
    x_train: &[FeatureVector],
    cfg: &KernelConfig,
) -> Result<Matrix> {
    check_dataset(x_eval, cfg)?;
    check_dataset(x_train, cfg)?;
    if x_eval[0].len() != x_train[0].len() {
        return Err(Error::DimensionMismatch {
            left: x_eval[0].len(),
            right: x_train[0].len(),
            context: "cross-gram dimensions",
        });
    }

    match cfg {
        KernelConfig::QuantumExact { feature_map } => {
            let eval_states = prepare_states(x_eval, feature_map)?;
            let train_states = prepare_states(x_train, feature_map)?;
            let rows: Result<Vec<Vec<f64>>> = {
                #[cfg(feature = "parallel")]
                {
                    eval_states
                        .par_iter()
                        .map(|e| {
                            train_states
                                .iter()
                                .map(|t| Ok(clamp_unit(e.inner_product(t)?.norm_sqr())))
                                .collect()
                        })
                        .collect()
                }
                #[cfg(not(feature = "parallel"))]
                {
                    eval_states
                        .iter()
                        .map(|e| {
                            train_states
                                .iter()
                                .map(|t| Ok(clamp_unit(e.inner_product(t)?.norm_sqr())))
                                .collect()
                        })
                        .collect()
                }
            };
            Matrix::from_rows(&rows?)
        }
        KernelConfig::QuantumShots {
            feature_map,
            shots,
            master_seed,
        } => {
            // seed rows and columns as separate index spaces so that the
            // same (row, col) always resamples identically
            let rows: Result<Vec<Vec<f64>>> = x_eval
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    x_train
                        .iter()
                        .enumerate()
                        .map(|(j, t)| {
                            let seed = derive_pair_seed(*master_seed, i, x_train.len() + j);
                            quantum_kernel_shots(e, t, feature_map, *shots, seed)
                        })
                        .collect()
                })
                .collect();
            Matrix::from_rows(&rows?)
        }
        plain => {
            let rows: Result<Vec<Vec<f64>>> = x_eval
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    x_train
                        .iter()
                        .enumerate()
                        .map(|(j, t)| kernel_value(e, t, plain, i, j))
                        .collect()
                })
                .collect();
            Matrix::from_rows(&rows?)
        }
    }
}

/// Smallest eigenvalue and max |K_ij - K_ji| of a square matrix.
pub fn psd_diagnostics(k: &Matrix) -> Result<PsdDiagnostics> {
    if !k.is_square() {
        return Err(Error::NotSquare {
            rows: k.rows(),
            cols: k.cols(),
        });
    }
    Ok(PsdDiagnostics {
        min_eigenvalue: linalg::min_eigenvalue(k)?,
        symmetry_error: k.symmetry_error(),
    })
}
