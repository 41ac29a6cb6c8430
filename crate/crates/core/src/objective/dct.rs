use crate::error::{Error, Result};

/// Closed-form first derivative of the expected objective along the
/// Givens curve at the DCT-II, under the real sinusoid model
/// y_t = cos(Ω·t + Φ) with Ω, Φ uniform on [0, 2π).
///
/// Averaging the product of four sample cosines leaves the index
/// constraint p − q + r = n with weight 3/8 after symmetrization, so
/// with w_m(t) = cos(π(t+½)m/B) and the orthonormal row scales
/// a_m = √(2/B)/√(1+δ[m]):
///
///   d/dα E[‖G(i,k,α)·C_B·y‖₄⁴]|₀
///     = (3/2)·(a_i³·a_k·S₁ − a_i·a_k³·S₂),
///   S₁ = Σ_{p−q+r=n} w_i(p)·w_i(q)·w_i(r)·w_k(n),   S₂ = (i ↔ k).
///
/// Row indices are zero-based with i > k; the scan over all pairs is
/// O(B³) per pair. Nonzero values witness that the DCT is not a fixed
/// point of coordinate ascent for this signal class.
pub fn dct_first_derivative(b: usize, i: usize, k: usize) -> Result<f64> {
    if b < 2 {
        return Err(Error::InvalidDimension(
            "derivative needs dimension at least 2".into(),
        ));
    }
    if i <= k || i >= b {
        return Err(Error::InvalidArguments(format!(
            "need b > i > k (zero-based), got b = {b}, i = {i}, k = {k}"
        )));
    }
    let bf = b as f64;
    let w = |m: usize, t: usize| (std::f64::consts::PI / bf * (t as f64 + 0.5) * m as f64).cos();
    let wi: Vec<f64> = (0..b).map(|t| w(i, t)).collect();
    let wk: Vec<f64> = (0..b).map(|t| w(k, t)).collect();

    let delta_sum = |x: &[f64], y: &[f64]| -> f64 {
        // Σ over p, q, r with n = p − q + r in range of x(p)x(q)x(r)y(n).
        let mut acc = 0.0;
        for p in 0..b {
            for q in 0..b {
                let lo = q.saturating_sub(p);
                let hi = (b + q - p).min(b);
                let xpq = x[p] * x[q];
                for r in lo..hi {
                    acc += xpq * x[r] * y[p + r - q];
                }
            }
        }
        acc
    };

    let scale = (2.0 / bf).sqrt();
    let ai = scale; // i > k ≥ 0, so row i never carries the DC factor
    let ak = scale / if k == 0 { std::f64::consts::SQRT_2 } else { 1.0 };
    let s1 = delta_sum(&wi, &wk);
    let s2 = delta_sum(&wk, &wi);
    Ok(1.5 * (ai.powi(3) * ak * s1 - ai * ak.powi(3) * s2))
}
