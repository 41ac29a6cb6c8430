use num_complex::Complex;

use super::unitary::UnitaryMatrix;
use crate::Complex64;

/// Column-wise projection of a unitary matrix onto the set of matrices
/// with one unit-modulus entry per column, together with the squared
/// Frobenius distance.
///
/// Column k is matched to `e^{jθ_k}·e_{m_k}` where `m_k` is the row of
/// the largest-modulus entry (lowest row index on ties) and θ_k its
/// phase. When `perm` has no repeated rows the projection target is a
/// complex permutation matrix and `is_permutation` is true; close to the
/// l4 maximum this is guaranteed, further away repeats may occur.
#[derive(Debug, Clone, PartialEq)]
pub struct CpProjection {
    /// Matched row per column (zero-based).
    pub perm: Vec<usize>,
    /// Matched phase per column.
    pub phases: Vec<f64>,
    /// Squared Frobenius distance Σ_k ‖w_k − e^{jθ_k}e_{m_k}‖².
    pub distance_sq: f64,
    /// Whether `perm` has no repeats.
    pub is_permutation: bool,
}

/// Projects each column of `w` onto its nearest phased standard basis
/// vector and reports the aggregate squared distance.
pub fn nearest_cp(w: &UnitaryMatrix) -> CpProjection {
    let n = w.dim();
    let m = w.matrix();
    let mut perm = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    let mut distance_sq = 0.0;

    for k in 0..n {
        let mut best_row = 0;
        let mut best_mod = -1.0;
        for i in 0..n {
            let md = m[(i, k)].norm();
            if md > best_mod {
                best_mod = md;
                best_row = i;
            }
        }
        let theta = m[(best_row, k)].arg();
        let target: Complex64 = Complex::from_polar(1.0, theta);
        for i in 0..n {
            let diff = if i == best_row {
                m[(i, k)] - target
            } else {
                m[(i, k)]
            };
            distance_sq += diff.norm_sqr();
        }
        perm.push(best_row);
        phases.push(theta);
    }

    let mut seen = vec![false; n];
    let mut is_permutation = true;
    for &p in &perm {
        if seen[p] {
            is_permutation = false;
            break;
        }
        seen[p] = true;
    }

    CpProjection {
        perm,
        phases,
        distance_sq,
        is_permutation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{dft_matrix, l4_norm4, random_cp, random_unitary};

    #[test]
    fn cp_matrix_has_zero_distance() {
        let c = random_cp(6, 4).unwrap();
        let proj = nearest_cp(&c);
        assert!(proj.distance_sq <= 1e-18);
        assert!(proj.is_permutation);
    }

    #[test]
    fn dft2_distance_matches_closed_form() {
        let f = dft_matrix(2).unwrap();
        let proj = nearest_cp(&f);
        let expected = 4.0 - 2.0 * std::f64::consts::SQRT_2;
        assert!((proj.distance_sq - expected).abs() < 1e-12);
        // Flat columns tie; lowest row index wins in both.
        assert_eq!(proj.perm, vec![0, 0]);
        assert!(!proj.is_permutation);
    }

    #[test]
    fn near_maximal_l4_implies_valid_permutation_and_bound() {
        // Matrices with (1/N)·l4 ≥ 1 − ε for small ε project onto a true
        // permutation with distance_sq ≤ 2Nε.
        let n = 4;
        let base = random_cp(n, 9).unwrap();
        for seed in 0..20 {
            let noise = random_unitary(n, 1000 + seed).unwrap();
            // Blend towards the CP matrix to stay in the near-maximal regime.
            let blended = base
                .matrix()
                .map(|z| z * 60.0)
                .sub(&noise.matrix().map(|z| -z));
            let w = crate::matkit::project_unitary(&blended).unwrap();
            let eps = 1.0 - l4_norm4(w.matrix()) / n as f64;
            let limit = (1.0 - std::f64::consts::FRAC_1_SQRT_2) / n as f64;
            assert!(eps < limit, "blend not tight enough: eps = {eps}");
            let proj = nearest_cp(&w);
            assert!(proj.is_permutation);
            assert!(proj.distance_sq <= 2.0 * n as f64 * eps + 1e-12);
        }
    }
}
