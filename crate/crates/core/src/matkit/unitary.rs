use num_complex::Complex;
use rand::seq::SliceRandom;

use super::cmatrix::CMatrix;
use super::svd::project_unitary;
use crate::error::{Error, Result};
use crate::rng;
use crate::Complex64;

/// Unitarity defect allowed at strict construction.
const STRICT_DEFECT_TOL: f64 = 1e-10;
/// Drift allowed to accumulate across in-place updates before the matrix
/// is automatically re-projected onto the unitary group.
const DRIFT_DEFECT_TOL: f64 = 1e-8;

/// Square complex matrix certified (at construction) to be unitary.
///
/// The certificate is the Frobenius norm of `AᴴA − I`, stored alongside
/// the entries. Freshly constructed values satisfy defect ≤ 1e−10;
/// values produced by long update chains may drift up to 1e−8 before
/// being re-projected automatically.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    m: CMatrix,
    defect: f64,
}

impl UnitaryMatrix {
    /// Certifies `m` as unitary. Errors when the defect exceeds 1e−10 or
    /// any row norm strays from 1 by more than 1e−10.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidArguments(format!(
                "unitary matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let defect = m.unitarity_defect();
        if defect > STRICT_DEFECT_TOL {
            return Err(Error::InvalidInput(format!(
                "unitarity defect {defect:.3e} exceeds {STRICT_DEFECT_TOL:.0e}"
            )));
        }
        for i in 0..m.rows() {
            let norm = m.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > STRICT_DEFECT_TOL {
                return Err(Error::InvalidInput(format!(
                    "row {i} norm {norm} strays from 1 beyond {STRICT_DEFECT_TOL:.0e}"
                )));
            }
        }
        Ok(Self { m, defect })
    }

    /// Accepts a product of unitary factors that may have drifted. Keeps
    /// the matrix as-is while the defect stays below 1e−8, otherwise
    /// re-projects onto the unitary group.
    pub(crate) fn from_drifted(m: CMatrix) -> Result<Self> {
        let defect = m.unitarity_defect();
        if defect <= DRIFT_DEFECT_TOL {
            Ok(Self { m, defect })
        } else {
            project_unitary(&m)
        }
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// Frobenius norm of `AᴴA − I` measured at construction.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// Re-projects onto the unitary group, resetting accumulated drift.
    pub fn renormalize(&self) -> Result<Self> {
        project_unitary(&self.m)
    }
}

/// Real-valued Givens rotation acting in the (i, k) coordinate plane,
/// zero-based row indices with `i > k`.
///
/// The rotated rows are `row_i' = cos(α)·row_i + sin(α)·row_k` and
/// `row_k' = −sin(α)·row_i + cos(α)·row_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation {
    pub i: usize,
    pub k: usize,
    pub alpha: f64,
}

impl GivensRotation {
    pub fn new(i: usize, k: usize, alpha: f64) -> Result<Self> {
        if k >= i {
            return Err(Error::InvalidArguments(format!(
                "Givens rotation requires i > k, got i = {i}, k = {k}"
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidInput("rotation angle must be finite".into()));
        }
        Ok(Self { i, k, alpha })
    }
}

/// Diagonal phase shift `e^{jβ}` applied to row `k` (zero-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShift {
    pub k: usize,
    pub beta: f64,
}

impl PhaseShift {
    pub fn new(k: usize, beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidInput("phase must be finite".into()));
        }
        Ok(Self { k, beta })
    }
}

/// One coordinate-ascent update `G(i,k,α)·R(i,βᵢ)·R(k,β_k)·A`.
///
/// Only rows i and k of `a` change. The phase shifts must target the
/// rotation's own rows (`bi.k == g.i`, `bk.k == g.k`). Unitarity is
/// preserved up to rounding; accumulated drift beyond 1e−8 triggers
/// re-projection.
pub fn apply_update(
    a: &UnitaryMatrix,
    g: &GivensRotation,
    bi: &PhaseShift,
    bk: &PhaseShift,
) -> Result<UnitaryMatrix> {
    if bi.k != g.i || bk.k != g.k {
        return Err(Error::InvalidArguments(format!(
            "phase-shift rows ({}, {}) must match rotation rows ({}, {})",
            bi.k, bk.k, g.i, g.k
        )));
    }
    if g.i >= a.dim() {
        return Err(Error::InvalidArguments(format!(
            "row index {} out of range for dimension {}",
            g.i,
            a.dim()
        )));
    }
    let (c, s) = (g.alpha.cos(), g.alpha.sin());
    let pi = Complex64::from_polar(1.0, bi.beta);
    let pk = Complex64::from_polar(1.0, bk.beta);

    let mut m = a.matrix().clone();
    let n = a.dim();
    for col in 0..n {
        let zi = a.matrix()[(g.i, col)] * pi;
        let zk = a.matrix()[(g.k, col)] * pk;
        m[(g.i, col)] = zi * c + zk * s;
        m[(g.k, col)] = -zi * s + zk * c;
    }
    UnitaryMatrix::from_drifted(m)
}

/// Unitary DFT matrix: entry (i, k) = exp(−j2πik/n)/√n (zero-based).
pub fn dft_matrix(n: usize) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("DFT size must be positive".into()));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let m = CMatrix::from_fn(n, n, |i, k| {
        let angle = -std::f64::consts::TAU * (i as f64) * (k as f64) / n as f64;
        Complex64::from_polar(scale, angle)
    });
    UnitaryMatrix::new(m)
}

/// Orthonormal DCT-II matrix: row k = √(2/n)/√(1+δ[k]) · cos(π(t+½)k/n).
pub fn dct2_matrix(n: usize) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("DCT size must be positive".into()));
    }
    let m = CMatrix::from_fn(n, n, |k, t| {
        let scale = (2.0 / n as f64).sqrt() / if k == 0 { std::f64::consts::SQRT_2 } else { 1.0 };
        let c = (std::f64::consts::PI / n as f64 * (t as f64 + 0.5) * k as f64).cos();
        Complex::new(scale * c, 0.0)
    });
    UnitaryMatrix::new(m)
}

/// Seeded Haar-like random unitary: polar factor of a complex Gaussian
/// matrix.
pub fn random_unitary(n: usize, seed: u64) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "unitary dimension must be positive".into(),
        ));
    }
    let mut r = rng::substream(seed, 0);
    let g = CMatrix::from_fn(n, n, |_, _| rng::complex_gaussian(&mut r));
    project_unitary(&g)
}

/// Seeded random complex permutation matrix: a permutation with
/// independent uniform phases on its nonzero entries.
pub fn random_cp(n: usize, seed: u64) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "permutation dimension must be positive".into(),
        ));
    }
    let mut r = rng::substream(seed, 1);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut r);
    let mut m = CMatrix::zeros(n, n);
    for (col, &row) in perm.iter().enumerate() {
        m[(row, col)] = Complex64::from_polar(1.0, rng::uniform_angle(&mut r));
    }
    UnitaryMatrix::new(m)
}
