//! Symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! Sized for Gram matrices up to a few hundred rows; no external linear
//! algebra dependency is worth carrying for that.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

/// Full eigendecomposition of a symmetric matrix.
///
/// The input is symmetrized as (A + A^T)/2 before iterating, so tiny
/// asymmetries from accumulation order do not matter.
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Err(Error::EmptyInput("eigendecomposition of 0x0 matrix"));
    }

    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, 0.5 * (a.get(i, j) + a.get(j, i)));
        }
    }
    let mut v = Matrix::identity(n);

    let scale: f64 = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
        .max(1.0);
    let tol = 1e-14 * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m.get(p, q).abs());
            }
        }
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= tol {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, c * mip - s * miq);
                    m.set(i, q, s * mip + c * miq);
                }
                for j in 0..n {
                    let mpj = m.get(p, j);
                    let mqj = m.get(q, j);
                    m.set(p, j, c * mpj - s * mqj);
                    m.set(q, j, s * mpj + c * mqj);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    if !converged {
        // one last check after the final sweep
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m.get(p, q).abs());
            }
        }
        if off > tol {
            return Err(Error::EigenNoConvergence(MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors.set(row, new_col, v.get(row, old_col));
        }
    }

    Ok(SymmetricEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &Matrix) -> Result<f64> {
    Ok(symmetric_eigen(a)?.eigenvalues[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_eigenvalues() {
        let eig = symmetric_eigen(&Matrix::identity(4)).unwrap();
        for ev in &eig.eigenvalues {
            assert!((ev - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_all_ones() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let eig = symmetric_eigen(&m).unwrap();
        assert!(eig.eigenvalues[0].abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn residual_is_small_on_random_symmetric() {
        // deterministic pseudo-random symmetric matrix
        let n = 12;
        let mut m = Matrix::zeros(n, n);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            for j in i..n {
                let x = next();
                m.set(i, j, x);
                m.set(j, i, x);
            }
        }
        let eig = symmetric_eigen(&m).unwrap();
        // check A v = lambda v for every pair
        for k in 0..n {
            for i in 0..n {
                let av: f64 = (0..n)
                    .map(|j| m.get(i, j) * eig.eigenvectors.get(j, k))
                    .sum();
                let lv = eig.eigenvalues[k] * eig.eigenvectors.get(i, k);
                assert!(
                    (av - lv).abs() < 1e-10,
                    "residual too large at ({i},{k}): {av} vs {lv}"
                );
            }
        }
    }

    #[test]
    fn rejects_non_square() {
        let m = Matrix::zeros(2, 3);
        assert!(symmetric_eigen(&m).is_err());
    }
}
