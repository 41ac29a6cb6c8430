//! Shared oracles for the integration suites. These stay independent of
//! the implementation paths they check: quadrature works on raw cosines,
//! never on the closed forms, and the perturbation builder only uses the
//! public projection/distance operations.

use beamsparse_core::matkit::{dct2_matrix, nearest_cp, project_unitary, random_cp, CMatrix};
use beamsparse_core::rng;
use beamsparse_core::UnitaryMatrix;

/// Trapezoid (= rectangle, by periodicity) quadrature of the first
/// derivative of the expected objective along the Givens plane (i, k) at
/// the DCT-II, under y_t = cos(Ω·t + Φ):
///
///   (1/(2π)²)·∬ 4·(x_i³·x_k − x_i·x_k³) dΩ dΦ,  x = C_B·y.
///
/// The integrand is a trigonometric polynomial of degree < 4B per axis,
/// so any grid with more than 4B points per axis is exact to rounding.
pub fn dct_first_derivative_quadrature(b: usize, i: usize, k: usize, points: usize) -> f64 {
    let c = dct2_matrix(b).unwrap();
    let ci: Vec<f64> = c.matrix().row(i).iter().map(|z| z.re).collect();
    let ck: Vec<f64> = c.matrix().row(k).iter().map(|z| z.re).collect();
    let step = std::f64::consts::TAU / points as f64;
    let mut acc = 0.0;
    let mut y = vec![0.0f64; b];
    for wi in 0..points {
        let omega = wi as f64 * step;
        for pi in 0..points {
            let phi = pi as f64 * step;
            for (t, yt) in y.iter_mut().enumerate() {
                *yt = (omega * t as f64 + phi).cos();
            }
            let xi: f64 = ci.iter().zip(&y).map(|(a, b)| a * b).sum();
            let xk: f64 = ck.iter().zip(&y).map(|(a, b)| a * b).sum();
            acc += xi * xi * xi * xk - xi * xk * xk * xk;
        }
    }
    4.0 * acc / (points * points) as f64
}

/// Unitary matrix at a prescribed nearest-CP squared distance, found by
/// bisection along a projected perturbation path from a random complex
/// permutation.
pub fn perturb_cp_to_distance(n: usize, target: f64, seed: u64) -> UnitaryMatrix {
    let c = random_cp(n, seed).unwrap();
    let mut r = rng::substream(seed, 7);
    let e = CMatrix::from_fn(n, n, |_, _| rng::complex_gaussian(&mut r));
    let at = |s: f64| -> (f64, UnitaryMatrix) {
        let blended = CMatrix::from_fn(n, n, |i, k| c.matrix()[(i, k)] + e[(i, k)] * s);
        let u = project_unitary(&blended).expect("perturbation keeps full rank");
        (nearest_cp(&u).distance_sq, u)
    };
    let mut hi = 0.1;
    while at(hi).0 < target {
        hi *= 2.0;
        assert!(hi < 1e3, "failed to bracket the target distance");
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if at(mid).0 < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi)).1
}
