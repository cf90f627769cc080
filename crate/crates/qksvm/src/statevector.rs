//! Dense complex statevector simulation of the gate set needed by the ZZ
//! feature map: Hadamard, single-qubit Z rotation, and a two-qubit ZZ phase.
//!
//! Bit ordering is little endian: qubit `q` is bit `q` of the amplitude
//! index, so index 1 means qubit 0 is set. RZ(theta) multiplies the
//! qubit-0 amplitude by e^{-i theta/2} and the qubit-1 amplitude by
//! e^{+i theta/2}. Global phases are kept.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest supported register; 2^24 amplitudes is already 256 MiB.
pub const MAX_QUBITS: usize = 24;

/// A single complex amplitude.
pub type ComplexAmp = Complex64;

/// Full statevector over `n_qubits` qubits (2^n amplitudes).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Outcome histogram of a simulated measurement run.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementCounts {
    shots: u64,
    counts: BTreeMap<usize, u64>,
}

impl MeasurementCounts {
    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn count(&self, basis_index: usize) -> u64 {
        self.counts.get(&basis_index).copied().unwrap_or(0)
    }

    /// Observed frequency of a basis state.
    pub fn frequency(&self, basis_index: usize) -> f64 {
        self.count(basis_index) as f64 / self.shots as f64
    }
}

impl StateVector {
    /// |0...0> on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount {
                n: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Build from raw amplitudes; the length must be a power of two.
    pub fn from_amps(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > (1 << MAX_QUBITS) {
            return Err(Error::Config(format!(
                "amplitude vector length {len} is not a power of two in range"
            )));
        }
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Hadamard on one qubit.
    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let pair = base | mask;
            let a = self.amps[base];
            let b = self.amps[pair];
            self.amps[base] = (a + b) * inv_sqrt2;
            self.amps[pair] = (a - b) * inv_sqrt2;
        }
        Ok(())
    }

    /// RZ(theta) = diag(e^{-i theta/2}, e^{+i theta/2}) on one qubit.
    pub fn apply_rz(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        if !theta.is_finite() {
            return Err(Error::NonFinite {
                context: "rz angle",
            });
        }
        let mask = 1usize << qubit;
        let lo = Complex64::from_polar(1.0, -theta / 2.0);
        let hi = Complex64::from_polar(1.0, theta / 2.0);
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            *amp *= if idx & mask == 0 { lo } else { hi };
        }
        Ok(())
    }

    /// exp(-i phi Z_q Z_k): phase e^{-i phi} where bits q and k agree,
    /// e^{+i phi} where they differ.
    pub fn apply_zz(&mut self, q: usize, k: usize, phi: f64) -> Result<()> {
        self.check_qubit(q)?;
        self.check_qubit(k)?;
        if q == k {
            return Err(Error::SamePair { q });
        }
        if !phi.is_finite() {
            return Err(Error::NonFinite {
                context: "zz angle",
            });
        }
        let mq = 1usize << q;
        let mk = 1usize << k;
        let same = Complex64::from_polar(1.0, -phi);
        let diff = Complex64::from_polar(1.0, phi);
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            let agree = ((idx & mq) != 0) == ((idx & mk) != 0);
            *amp *= if agree { same } else { diff };
        }
        Ok(())
    }

    /// <self|other> = sum conj(a_i) b_i.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
                context: "inner product qubit counts",
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Probability of measuring the all-zeros outcome: |amp_0|^2.
    pub fn all_zero_probability(&self) -> f64 {
        self.amps[0].norm_sqr()
    }

    /// Draw `shots` basis-state indices from the |amp|^2 distribution with a
    /// seeded ChaCha8 generator. Same (state, shots, seed) gives the same
    /// counts.
    pub fn sample_measurements(&self, shots: u64, seed: u64) -> Result<MeasurementCounts> {
        if shots == 0 {
            return Err(Error::InvalidShots);
        }
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0f64;
        for amp in &self.amps {
            acc += amp.norm_sqr();
            cumulative.push(acc);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        let last = self.amps.len() - 1;
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * acc;
            let idx = cumulative.partition_point(|&c| c <= u).min(last);
            *counts.entry(idx).or_insert(0) += 1;
        }
        Ok(MeasurementCounts { shots, counts })
    }
}
