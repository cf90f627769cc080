//! Cross-checks the in-place gate implementations against explicit
//! 2^n x 2^n matrices built from Kronecker products, plus property tests
//! for norm preservation, unitarity and diagonal-gate commutation.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qksvm::statevector::StateVector;

type CMat = Vec<Vec<Complex64>>;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn identity(dim: usize) -> CMat {
    let mut m = vec![vec![czero(); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![czero(); ra * rb]; ra * rb];
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

/// Embed a single-qubit matrix on qubit q of an n-qubit register
/// (little-endian: qubit q is bit q of the index).
fn embed_single(gate: &CMat, qubit: usize, n: usize) -> CMat {
    let low = identity(1 << qubit);
    let high = identity(1 << (n - qubit - 1));
    kron(&high, &kron(gate, &low))
}

fn h_matrix() -> CMat {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        vec![Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
        vec![Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
    ]
}

fn rz_matrix(theta: f64) -> CMat {
    vec![
        vec![Complex64::from_polar(1.0, -theta / 2.0), czero()],
        vec![czero(), Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

fn z_matrix() -> CMat {
    vec![
        vec![Complex64::new(1.0, 0.0), czero()],
        vec![czero(), Complex64::new(-1.0, 0.0)],
    ]
}

fn matmul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let mut out = vec![vec![czero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == czero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// exp(-i phi Z_q Z_k) built from the product of embedded Z matrices:
/// the product is diagonal with entries +-1, so the exponential acts
/// entrywise on the diagonal.
fn zz_matrix(q: usize, k: usize, phi: f64, n: usize) -> CMat {
    let zq = embed_single(&z_matrix(), q, n);
    let zk = embed_single(&z_matrix(), k, n);
    let prod = matmul(&zq, &zk);
    let dim = 1 << n;
    let mut out = vec![vec![czero(); dim]; dim];
    for (i, row) in out.iter_mut().enumerate() {
        let sign = prod[i][i].re; // +1 or -1
        row[i] = Complex64::from_polar(1.0, -phi * sign);
    }
    out
}

fn apply_matrix(m: &CMat, amps: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(amps).map(|(c, a)| c * a).sum())
        .collect()
}

fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps: Vec<Complex64> = (0..(1usize << n))
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amps(amps).unwrap()
}

fn assert_amps_close(a: &StateVector, b: &[Complex64], tol: f64) {
    for (i, (x, y)) in a.amps().iter().zip(b).enumerate() {
        assert!(
            (x - y).norm() < tol,
            "amplitude {i} differs: {x} vs {y} (tol {tol})"
        );
    }
}

#[test]
fn hadamard_matches_kronecker_oracle() {
    for n in 1..=3 {
        for qubit in 0..n {
            for seed in 0..4u64 {
                let state = random_state(n, 100 * seed + qubit as u64);
                let oracle = apply_matrix(&embed_single(&h_matrix(), qubit, n), state.amps());
                let mut fast = state.clone();
                fast.apply_hadamard(qubit).unwrap();
                assert_amps_close(&fast, &oracle, 1e-12);
            }
        }
    }
}

#[test]
fn rz_matches_kronecker_oracle() {
    for n in 1..=3 {
        for qubit in 0..n {
            for (s, &theta) in [0.0, 0.41, -2.7, 3.3].iter().enumerate() {
                let state = random_state(n, 17 * s as u64 + qubit as u64);
                let oracle = apply_matrix(&embed_single(&rz_matrix(theta), qubit, n), state.amps());
                let mut fast = state.clone();
                fast.apply_rz(qubit, theta).unwrap();
                assert_amps_close(&fast, &oracle, 1e-12);
            }
        }
    }
}

#[test]
fn zz_matches_kronecker_oracle() {
    for n in 2..=3 {
        for q in 0..n {
            for k in (q + 1)..n {
                for (s, &phi) in [0.0, 0.9, -1.4, 6.1].iter().enumerate() {
                    let state = random_state(n, 31 * s as u64 + (q * 7 + k) as u64);
                    let oracle = apply_matrix(&zz_matrix(q, k, phi, n), state.amps());
                    let mut fast = state.clone();
                    fast.apply_zz(q, k, phi).unwrap();
                    assert_amps_close(&fast, &oracle, 1e-12);
                }
            }
        }
    }
}

#[test]
fn sampling_tracks_exact_distribution() {
    // 4 sigma binomial bound per basis state, over many seeded trials;
    // at least 99% of trials must stay within bound on every state
    let mut state = StateVector::zero_state(3).unwrap();
    for q in 0..3 {
        state.apply_hadamard(q).unwrap();
    }
    state.apply_rz(0, 0.8).unwrap();
    state.apply_zz(0, 2, 1.1).unwrap();
    state.apply_hadamard(1).unwrap();
    state.apply_hadamard(2).unwrap();

    let probs: Vec<f64> = state.amps().iter().map(|a| a.norm_sqr()).collect();
    let shots = 4096u64;
    let trials = 200;
    let mut ok = 0;
    for seed in 0..trials {
        let counts = state.sample_measurements(shots, seed).unwrap();
        let within = probs.iter().enumerate().all(|(idx, &p)| {
            let bound = 4.0 * (p * (1.0 - p) / shots as f64).sqrt() + 1e-12;
            (counts.frequency(idx) - p).abs() <= bound
        });
        if within {
            ok += 1;
        }
    }
    assert!(
        ok * 100 >= trials * 99,
        "only {ok}/{trials} trials inside the 4-sigma bound"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_preserved_under_gate_sequences(
        seed in 0u64..1000,
        gates in prop::collection::vec((0usize..3, 0usize..4, -3.0f64..3.0), 1..20),
    ) {
        let n = 4;
        let mut state = random_state(n, seed);
        for (kind, qubit, angle) in gates {
            match kind {
                0 => state.apply_hadamard(qubit).unwrap(),
                1 => state.apply_rz(qubit, angle).unwrap(),
                _ => {
                    let other = (qubit + 1) % n;
                    state.apply_zz(qubit, other, angle).unwrap();
                }
            }
        }
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gates_preserve_inner_products(
        seed_a in 0u64..500,
        seed_b in 500u64..1000,
        kind in 0usize..3,
        qubit in 0usize..3,
        angle in -3.0f64..3.0,
    ) {
        let n = 3;
        let s = random_state(n, seed_a);
        let t = random_state(n, seed_b);
        let before = s.inner_product(&t).unwrap();
        let mut gs = s.clone();
        let mut gt = t.clone();
        match kind {
            0 => {
                gs.apply_hadamard(qubit).unwrap();
                gt.apply_hadamard(qubit).unwrap();
            }
            1 => {
                gs.apply_rz(qubit, angle).unwrap();
                gt.apply_rz(qubit, angle).unwrap();
            }
            _ => {
                let other = (qubit + 1) % n;
                gs.apply_zz(qubit, other, angle).unwrap();
                gt.apply_zz(qubit, other, angle).unwrap();
            }
        }
        let after = gs.inner_product(&gt).unwrap();
        prop_assert!((before - after).norm() < 1e-10);
    }

    #[test]
    fn diagonal_gates_commute(
        seed in 0u64..1000,
        theta in -3.0f64..3.0,
        phi in -3.0f64..3.0,
        qubit in 0usize..3,
        q in 0usize..3,
    ) {
        let n = 3;
        let k = (q + 1) % n;
        let state = random_state(n, seed);

        let mut ab = state.clone();
        ab.apply_rz(qubit, theta).unwrap();
        ab.apply_zz(q, k, phi).unwrap();

        let mut ba = state.clone();
        ba.apply_zz(q, k, phi).unwrap();
        ba.apply_rz(qubit, theta).unwrap();

        for (x, y) in ab.amps().iter().zip(ba.amps()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }
}
