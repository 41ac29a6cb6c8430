use num_complex::Complex;

use crate::matkit::CMatrix;
use crate::Complex64;

/// Fourth-order joint moments of one transformed coordinate pair
/// (x_i, x_k):
///
///   m[u][v] = E[ x_i^u·x_k^{2−u} · (x*_i)^v·(x*_k)^{2−v} ],  u, v ∈ {0,1,2}.
///
/// These nine numbers determine E|p·x_i + s·x_k|⁴ for any complex
/// coefficients (p, s), so the whole 2-D inner problem of coordinate
/// ascent — and the first/second derivative conditions — evaluate in
/// O(1) once the moments are known. Hermitian symmetry m[v][u] = m[u][v]*
/// holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PairMoments {
    m: [[Complex64; 3]; 3],
}

const BINOM2: [f64; 3] = [1.0, 2.0, 1.0];

impl PairMoments {
    /// Empirical moments from the transformed rows x_i, x_k (sum over
    /// samples, or mean when `mean` is set).
    pub(crate) fn from_rows(xi: &[Complex64], xk: &[Complex64], mean: bool) -> Self {
        let mut m = [[Complex64::ZERO; 3]; 3];
        for (&a, &b) in xi.iter().zip(xk) {
            // Unstarred monomials ordered by the power of x_i.
            let mono = [b * b, a * b, a * a];
            for u in 0..3 {
                for v in u..3 {
                    m[u][v] += mono[u] * mono[v].conj();
                }
            }
        }
        if mean {
            let inv = 1.0 / xi.len() as f64;
            for row in m.iter_mut() {
                for z in row.iter_mut() {
                    *z *= inv;
                }
            }
        }
        for u in 0..3 {
            for v in 0..u {
                m[u][v] = m[v][u].conj();
            }
        }
        Self { m }
    }

    /// Exact moments under the single-path model with |c|⁴ = `c4`:
    /// the expectation of y_p·y*_q·y_r·y*_n collapses to the index
    /// constraint p − q + r = n.
    pub(crate) fn analytic_l1(a: &CMatrix, i: usize, k: usize, c4: f64) -> Self {
        let rows_for = |power: usize| -> (usize, usize) {
            match power {
                0 => (k, k),
                1 => (i, k),
                _ => (i, i),
            }
        };
        let b = a.cols();
        let mut m = [[Complex64::ZERO; 3]; 3];
        for u in 0..3 {
            let (a1, a2) = rows_for(u);
            for v in u..3 {
                let (b1, b2) = rows_for(v);
                let mut acc: Complex64 = Complex::ZERO;
                for p in 0..b {
                    for q in 0..b {
                        let lo = p.saturating_sub(q);
                        let hi = (b + p - q).min(b);
                        for n in lo..hi {
                            let r = n + q - p;
                            acc += a[(a1, p)] * a[(b1, q)].conj() * a[(a2, r)] * a[(b2, n)].conj();
                        }
                    }
                }
                m[u][v] = acc * c4;
            }
        }
        for u in 0..3 {
            for v in 0..u {
                m[u][v] = m[v][u].conj();
            }
        }
        Self { m }
    }

    /// E|p·x_i + s·x_k|⁴ as a function of the mixing coefficients.
    pub(crate) fn quartic(&self, p: Complex64, s: Complex64) -> f64 {
        let coeff = [s * s, p * s, p * p];
        let mut acc: Complex64 = Complex::ZERO;
        for u in 0..3 {
            for v in 0..3 {
                acc += coeff[u] * coeff[v].conj() * self.m[u][v] * (BINOM2[u] * BINOM2[v]);
            }
        }
        acc.re
    }

    /// Rotated-pair objective E|x'_i|⁴ + E|x'_k|⁴ after the update
    /// G(i,k,α)·R(i,Δβ)·R(k,0); the rest of the l4 sum does not move.
    pub(crate) fn pair_objective(&self, alpha: f64, dbeta: f64) -> f64 {
        let (c, s) = (alpha.cos(), alpha.sin());
        let ph = Complex64::from_polar(1.0, dbeta);
        self.quartic(ph * c, Complex::new(s, 0.0)) + self.quartic(-ph * s, Complex::new(c, 0.0))
    }

    /// d/dα of the expected objective along the Givens curve at α = 0:
    /// 4·E[Re{x_i·x*_k}(|x_i|² − |x_k|²)].
    pub(crate) fn first_derivative(&self) -> f64 {
        4.0 * (self.m[2][1] - self.m[1][0]).re
    }

    /// d²/dα² at α = 0:
    /// 4·E[2Re{x²_k(x*_i)²} + 4|x_i|²|x_k|² − |x_k|⁴ − |x_i|⁴].
    pub(crate) fn second_derivative(&self) -> f64 {
        4.0 * (2.0 * self.m[0][2].re + 4.0 * self.m[1][1].re
            - self.m[0][0].re
            - self.m[2][2].re)
    }
}
