use num_complex::Complex;

use super::cmatrix::CMatrix;
use super::unitary::UnitaryMatrix;
use crate::error::{Error, Result};
use crate::Complex64;

/// Off-diagonal reduction target for the Jacobi sweeps, relative to the
/// geometric mean of the paired column norms.
const JACOBI_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 60;

/// Relative rank threshold under which the unitary projection UVᴴ is
/// treated as non-unique.
pub(crate) const RANK_THRESHOLD: f64 = 1e-12;

/// Singular value decomposition `m = U · diag(sigma) · Vᴴ`.
///
/// `u` is rows×r and `v` is cols×r with r = min(rows, cols); both have
/// orthonormal columns and `sigma` is non-negative, non-increasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// `U · diag(sigma) · Vᴴ`, for residual checks.
    pub fn reconstruct(&self) -> CMatrix {
        let rows = self.u.rows();
        let cols = self.v.rows();
        CMatrix::from_fn(rows, cols, |i, k| {
            (0..self.sigma.len())
                .map(|p| self.u[(i, p)] * self.sigma[p] * self.v[(k, p)].conj())
                .sum()
        })
    }
}

/// One-sided Jacobi SVD.
///
/// Works directly on the columns: each rotation orthogonalizes one column
/// pair by solving the implicit 2×2 Hermitian eigenproblem of their Gram
/// matrix. Cyclic pair order and fixed sweep limits make the result
/// deterministic. Accurate for the small dense matrices used here
/// (N ≤ 256).
pub fn jacobi_svd(m: &CMatrix) -> Result<Svd> {
    if !m.all_finite() {
        return Err(Error::InvalidInput("non-finite entry in SVD input".into()));
    }
    if m.rows() < m.cols() {
        // Tall case only; transpose, decompose, and swap the factors.
        let svd = jacobi_svd(&m.hermitian())?;
        return Ok(Svd {
            u: svd.v,
            sigma: svd.sigma,
            v: svd.u,
        });
    }

    let rows = m.rows();
    let n = m.cols();
    let mut w = m.clone();
    let mut v = CMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (app, aqq, apq) = column_gram(&w, p, q);
                if apq.norm() <= JACOBI_TOL * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                // Phase that makes the cross term real, then the classic
                // symmetric Jacobi rotation on the 2x2 Gram matrix.
                let phase = Complex64::from_polar(1.0, apq.arg());
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    // Singular values are the column norms; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|k| w.col(k).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b)));

    let sigma: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let v_sorted = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    let mut u = CMatrix::zeros(rows, n);
    for (k, &src) in order.iter().enumerate() {
        if norms[src] > 0.0 {
            for i in 0..rows {
                u[(i, k)] = w[(i, src)] / norms[src];
            }
        }
    }
    complete_orthonormal(&mut u, &sigma);

    Ok(Svd {
        u,
        sigma,
        v: v_sorted,
    })
}

/// Projection onto the unitary group: the nearest unitary matrix in
/// Frobenius norm, `U·Vᴴ` from the SVD.
///
/// Errors when the input is numerically rank deficient
/// (σ_min ≤ 1e−12·σ_max), where the polar factor is not unique.
pub fn project_unitary(m: &CMatrix) -> Result<UnitaryMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidArguments(format!(
            "unitary projection requires a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let svd = jacobi_svd(m)?;
    let sigma_max = svd.sigma[0];
    let sigma_min = *svd.sigma.last().unwrap();
    let threshold = RANK_THRESHOLD * sigma_max;
    if sigma_max == 0.0 || sigma_min <= threshold {
        return Err(Error::DegenerateProjection {
            sigma_min,
            threshold,
        });
    }
    UnitaryMatrix::new(svd.u.mul(&svd.v.hermitian()))
}

/// Gram data for columns (p, q): (‖w_p‖², ‖w_q‖², w_pᴴ·w_q).
fn column_gram(w: &CMatrix, p: usize, q: usize) -> (f64, f64, Complex64) {
    let mut app = 0.0;
    let mut aqq = 0.0;
    let mut apq = Complex::ZERO;
    for i in 0..w.rows() {
        let wp = w[(i, p)];
        let wq = w[(i, q)];
        app += wp.norm_sqr();
        aqq += wq.norm_sqr();
        apq += wp.conj() * wq;
    }
    (app, aqq, apq)
}

/// In-place right-multiplication of columns (p, q) by the phased rotation.
fn rotate_columns(w: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    for i in 0..w.rows() {
        let wp = w[(i, p)];
        let wq = w[(i, q)];
        w[(i, p)] = wp * c - wq * phase.conj() * s;
        w[(i, q)] = wp * phase * s + wq * c;
    }
}

/// Fills the U columns left undefined by exactly-zero singular values
/// with unit vectors orthogonal to the rest (Gram-Schmidt over the
/// canonical basis).
fn complete_orthonormal(u: &mut CMatrix, sigma: &[f64]) {
    let rows = u.rows();
    for k in 0..sigma.len() {
        if sigma[k] > 0.0 {
            continue;
        }
        'candidates: for cand in 0..rows {
            let mut col: Vec<Complex64> = (0..rows)
                .map(|i| {
                    if i == cand {
                        Complex::ONE
                    } else {
                        Complex::ZERO
                    }
                })
                .collect();
            for other in 0..sigma.len() {
                if other == k {
                    continue;
                }
                let dot: Complex64 = (0..rows).map(|i| u[(i, other)].conj() * col[i]).sum();
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= dot * u[(i, other)];
                }
            }
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.5 {
                for (i, c) in col.iter().enumerate() {
                    u[(i, k)] = c / norm;
                }
                break 'candidates;
            }
        }
    }
}
