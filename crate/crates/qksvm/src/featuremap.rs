//! ZZ feature map with full entanglement.
//!
//! One repetition applies a Hadamard to every qubit, a Z rotation by the
//! single-feature angle on every qubit, then a ZZ phase for every
//! entangling pair. The pair angle is (pi - x_q)(pi - x_k). Features are
//! encoded one per qubit.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// A feature vector; expected in [0, 1] after MinMax scaling, but any
/// finite values are accepted.
pub type FeatureVector = Vec<f64>;

/// Angle convention for the encoding rotations.
///
/// `Paper` uses angle x_q for the single-qubit rotation and
/// (pi - x_q)(pi - x_k) for the pair phase. `Doubled` multiplies both by
/// two, which is what most circuit libraries do by default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleConvention {
    #[default]
    Paper,
    Doubled,
}

impl FromStr for AngleConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(AngleConvention::Paper),
            "doubled" => Ok(AngleConvention::Doubled),
            other => Err(Error::Config(format!(
                "unknown angle convention '{other}' (expected paper|doubled)"
            ))),
        }
    }
}

impl fmt::Display for AngleConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleConvention::Paper => write!(f, "paper"),
            AngleConvention::Doubled => write!(f, "doubled"),
        }
    }
}

/// Raw pair angle (pi - xq)(pi - xk), before any convention factor.
pub fn pair_angle(xq: f64, xk: f64) -> f64 {
    (PI - xq) * (PI - xk)
}

/// All pairs (q, k) with q < k, outer loop over q ascending.
pub fn full_entanglement_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for q in 0..n {
        for k in (q + 1)..n {
            pairs.push((q, k));
        }
    }
    pairs
}

/// Configuration of the encoding circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMapConfig {
    pub n_qubits: usize,
    pub reps: usize,
    pub convention: AngleConvention,
    pub entangling_pairs: Vec<(usize, usize)>,
}

impl FeatureMapConfig {
    /// Full-entanglement map with one repetition and the default angle
    /// convention.
    pub fn full(n_qubits: usize) -> Self {
        FeatureMapConfig {
            n_qubits,
            reps: 1,
            convention: AngleConvention::Paper,
            entangling_pairs: full_entanglement_pairs(n_qubits),
        }
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_convention(mut self, convention: AngleConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::Config("feature map needs at least 1 qubit".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config(
                "feature map needs at least 1 repetition".into(),
            ));
        }
        for &(q, k) in &self.entangling_pairs {
            if q >= k {
                return Err(Error::Config(format!(
                    "entangling pair ({q}, {k}) must satisfy q < k"
                )));
            }
            if k >= self.n_qubits {
                return Err(Error::Config(format!(
                    "entangling pair ({q}, {k}) out of range for {} qubits",
                    self.n_qubits
                )));
            }
        }
        Ok(())
    }

    fn factor(&self) -> f64 {
        match self.convention {
            AngleConvention::Paper => 1.0,
            AngleConvention::Doubled => 2.0,
        }
    }

    /// Single-qubit rotation angle for feature value x.
    pub fn single_angle(&self, x: f64) -> f64 {
        self.factor() * x
    }

    /// Pair phase angle for feature values (xq, xk).
    pub fn pair_phase(&self, xq: f64, xk: f64) -> f64 {
        self.factor() * pair_angle(xq, xk)
    }
}

/// One gate of the encoding sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H { qubit: usize },
    Rz { qubit: usize, theta: f64 },
    Zz { q: usize, k: usize, phi: f64 },
}

impl Gate {
    fn inverse(self) -> Gate {
        match self {
            Gate::H { qubit } => Gate::H { qubit },
            Gate::Rz { qubit, theta } => Gate::Rz {
                qubit,
                theta: -theta,
            },
            Gate::Zz { q, k, phi } => Gate::Zz { q, k, phi: -phi },
        }
    }
}

fn check_input(x: &[f64], cfg: &FeatureMapConfig) -> Result<()> {
    cfg.validate()?;
    if x.len() != cfg.n_qubits {
        return Err(Error::Encoding {
            len: x.len(),
            n_qubits: cfg.n_qubits,
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "feature vector",
        });
    }
    Ok(())
}

/// Gate sequence of the encoding circuit for `x`, in application order.
pub fn encoding_gates(x: &[f64], cfg: &FeatureMapConfig) -> Result<Vec<Gate>> {
    check_input(x, cfg)?;
    let per_rep = 2 * cfg.n_qubits + cfg.entangling_pairs.len();
    let mut gates = Vec::with_capacity(cfg.reps * per_rep);
    for _ in 0..cfg.reps {
        for q in 0..cfg.n_qubits {
            gates.push(Gate::H { qubit: q });
        }
        for (q, &xq) in x.iter().enumerate() {
            gates.push(Gate::Rz {
                qubit: q,
                theta: cfg.single_angle(xq),
            });
        }
        for &(q, k) in &cfg.entangling_pairs {
            gates.push(Gate::Zz {
                q,
                k,
                phi: cfg.pair_phase(x[q], x[k]),
            });
        }
    }
    Ok(gates)
}

/// Exact inverse of a gate sequence: reversed order, negated angles.
pub fn inverse_gates(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(|g| g.inverse()).collect()
}

/// Apply a gate sequence in order.
pub fn apply_gates(state: &mut StateVector, gates: &[Gate]) -> Result<()> {
    for gate in gates {
        match *gate {
            Gate::H { qubit } => state.apply_hadamard(qubit)?,
            Gate::Rz { qubit, theta } => state.apply_rz(qubit, theta)?,
            Gate::Zz { q, k, phi } => state.apply_zz(q, k, phi)?,
        }
    }
    Ok(())
}

/// Encode `x` as a statevector: the full circuit applied to |0...0>.
pub fn prepare_state(x: &[f64], cfg: &FeatureMapConfig) -> Result<StateVector> {
    let gates = encoding_gates(x, cfg)?;
    let mut state = StateVector::zero_state(cfg.n_qubits)?;
    apply_gates(&mut state, &gates)?;
    Ok(state)
}

/// Dense complex matrix, row-major nested vectors. Only used for the
/// small-register unitary oracle below.
pub type UnitaryMatrix = Vec<Vec<Complex64>>;

const MAX_UNITARY_QUBITS: usize = 3;

fn cidentity(dim: usize) -> UnitaryMatrix {
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn cmatmul(a: &UnitaryMatrix, b: &UnitaryMatrix) -> UnitaryMatrix {
    let n = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn kron(a: &UnitaryMatrix, b: &UnitaryMatrix) -> UnitaryMatrix {
    let (ra, rb) = (a.len(), b.len());
    let dim = ra * rb;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for ia in 0..ra {
        for ja in 0..ra {
            for ib in 0..rb {
                for jb in 0..rb {
                    out[ia * rb + ib][ja * rb + jb] = a[ia][ja] * b[ib][jb];
                }
            }
        }
    }
    out
}

/// Full-register matrix of a single gate. Single-qubit gates are placed by
/// Kronecker products honoring the little-endian bit order; the ZZ phase is
/// diagonal and built from the Z_q Z_k eigenvalue per basis state.
pub fn gate_matrix(gate: &Gate, n_qubits: usize) -> UnitaryMatrix {
    let dim = 1usize << n_qubits;
    match *gate {
        Gate::H { qubit } => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let h: UnitaryMatrix = vec![
                vec![Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
                vec![Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
            ];
            // index bit `qubit` sits between `qubit` low bits and the rest
            let low = cidentity(1 << qubit);
            let high = cidentity(1 << (n_qubits - qubit - 1));
            kron(&high, &kron(&h, &low))
        }
        Gate::Rz { qubit, theta } => {
            let mut m = cidentity(dim);
            for (i, row) in m.iter_mut().enumerate() {
                let phase = if i & (1 << qubit) == 0 {
                    -theta / 2.0
                } else {
                    theta / 2.0
                };
                row[i] = Complex64::from_polar(1.0, phase);
            }
            m
        }
        Gate::Zz { q, k, phi } => {
            let mut m = cidentity(dim);
            for (i, row) in m.iter_mut().enumerate() {
                let agree = ((i >> q) & 1) == ((i >> k) & 1);
                let phase = if agree { -phi } else { phi };
                row[i] = Complex64::from_polar(1.0, phase);
            }
            m
        }
    }
}

/// Explicit 2^n x 2^n unitary of the whole encoding circuit. Test facility
/// for registers of up to three qubits; it cross-checks the in-place gate
/// path against plain matrix arithmetic.
pub fn feature_map_unitary(x: &[f64], cfg: &FeatureMapConfig) -> Result<UnitaryMatrix> {
    check_input(x, cfg)?;
    if cfg.n_qubits > MAX_UNITARY_QUBITS {
        return Err(Error::Config(format!(
            "explicit unitary limited to {MAX_UNITARY_QUBITS} qubits, got {}",
            cfg.n_qubits
        )));
    }
    let gates = encoding_gates(x, cfg)?;
    let mut u = cidentity(1 << cfg.n_qubits);
    for gate in &gates {
        u = cmatmul(&gate_matrix(gate, cfg.n_qubits), &u);
    }
    Ok(u)
}

/// Apply an explicit unitary to a statevector (oracle path).
pub fn apply_unitary(u: &UnitaryMatrix, state: &StateVector) -> Result<StateVector> {
    let dim = u.len();
    if dim != state.amps().len() {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: state.amps().len(),
            context: "unitary vs state dimension",
        });
    }
    let amps = u
        .iter()
        .map(|row| row.iter().zip(state.amps()).map(|(m, a)| m * a).sum())
        .collect();
    StateVector::from_amps(amps)
}

/// max |(U^dag U - I)_ij|, a unitarity check for the oracle matrices.
pub fn unitarity_error(u: &UnitaryMatrix) -> f64 {
    let n = u.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in u {
                acc += row[i].conj() * row[j];
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - Complex64::new(expect, 0.0)).norm());
        }
    }
    worst
}
