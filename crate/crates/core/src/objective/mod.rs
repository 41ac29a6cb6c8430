//! l4 sparsity objectives, gradients, and coordinate-ascent derivatives.
//!
//! The sparsity of a transformed sample x = A·y is measured by ‖x‖₄⁴.
//! Three expectation backends evaluate it: a finite dataset (sum over
//! columns), Monte-Carlo draws from a stochastic model (mean over a
//! materialized sample set), and an exact closed form for the single-path
//! multipath model, where E[y_p·y*_q·y_r·y*_n] = |c|⁴·δ[p−q+r−n] reduces
//! expectations to sums over index tuples with p−q+r=n.

mod dct;
mod moments;

pub use dct::dct_first_derivative;
pub(crate) use moments::PairMoments;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkit::{l4_norm4, CMatrix, UnitaryMatrix};
use crate::models::{
    sample_multipath_seeded, sample_sinusoid_seeded, MultipathModel, SampleSet, SinusoidModel,
};
use crate::Complex64;

/// A generative column model usable as an expectation source.
#[derive(Debug, Clone, PartialEq)]
pub enum StochasticModel {
    Multipath(MultipathModel),
    Sinusoid(SinusoidModel),
}

impl StochasticModel {
    pub fn dim(&self) -> usize {
        match self {
            StochasticModel::Multipath(m) => m.b,
            StochasticModel::Sinusoid(m) => m.b,
        }
    }

    /// Materializes `n` samples with an explicit seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleSet> {
        match self {
            StochasticModel::Multipath(m) => sample_multipath_seeded(m, n, seed),
            StochasticModel::Sinusoid(m) => sample_sinusoid_seeded(m, n, seed),
        }
    }
}

/// How the expectation in the objective is evaluated.
///
/// Learners are expectation-agnostic: they accept any spec and resolve it
/// once into a concrete backend.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveSpec {
    /// Finite dataset; the objective is a sum over columns.
    Dataset(SampleSet),
    /// Monte-Carlo: the mean over `samples` draws materialized from
    /// (model, seed).
    MonteCarlo {
        model: StochasticModel,
        samples: usize,
        seed: u64,
    },
    /// Exact expectation for the single-path model with gain magnitude
    /// `gain_mag`.
    AnalyticL1 { dim: usize, gain_mag: f64 },
}

impl ObjectiveSpec {
    pub fn dim(&self) -> usize {
        match self {
            ObjectiveSpec::Dataset(y) => y.dim(),
            ObjectiveSpec::MonteCarlo { model, .. } => model.dim(),
            ObjectiveSpec::AnalyticL1 { dim, .. } => *dim,
        }
    }

    /// Resolves the spec into an evaluation backend, materializing
    /// Monte-Carlo draws.
    pub(crate) fn resolve(&self) -> Result<Backend> {
        match self {
            ObjectiveSpec::Dataset(y) => Ok(Backend::Samples {
                set: y.clone(),
                mean: false,
            }),
            ObjectiveSpec::MonteCarlo {
                model,
                samples,
                seed,
            } => {
                if *samples == 0 {
                    return Err(Error::InvalidArguments(
                        "Monte-Carlo sample count must be positive".into(),
                    ));
                }
                Ok(Backend::Samples {
                    set: model.sample(*samples, *seed)?,
                    mean: true,
                })
            }
            ObjectiveSpec::AnalyticL1 { dim, gain_mag } => {
                if *dim == 0 {
                    return Err(Error::InvalidDimension(
                        "analytic objective dimension must be positive".into(),
                    ));
                }
                if !(*gain_mag > 0.0) {
                    return Err(Error::InvalidArguments(
                        "gain magnitude must be positive".into(),
                    ));
                }
                Ok(Backend::Analytic {
                    c4: gain_mag.powi(4),
                })
            }
        }
    }
}

/// Resolved expectation backend shared by learners and derivative checks.
#[derive(Debug, Clone)]
pub(crate) enum Backend {
    Samples { set: SampleSet, mean: bool },
    Analytic { c4: f64 },
}

impl Backend {
    /// Objective value at `a`.
    pub(crate) fn value(&self, a: &UnitaryMatrix) -> f64 {
        match self {
            Backend::Samples { set, mean } => {
                let v = l4_norm4(&a.matrix().mul(set.matrix()));
                if *mean {
                    v / set.len() as f64
                } else {
                    v
                }
            }
            Backend::Analytic { c4, .. } => g_analytic_l1_scaled(a.matrix(), *c4),
        }
    }

    /// Objective gradient at `a` (the matrix the MSP step projects).
    pub(crate) fn gradient(&self, a: &UnitaryMatrix) -> CMatrix {
        match self {
            Backend::Samples { set, mean } => {
                let mut g = grad_samples(a.matrix(), set);
                if *mean {
                    g = g.scale(Complex::new(1.0 / set.len() as f64, 0.0));
                }
                g
            }
            Backend::Analytic { c4, .. } => grad_analytic_scaled(a.matrix(), *c4),
        }
    }
}

/// Dataset objective: g(A, Y) = Σ_m ‖A·y_m‖₄⁴ = ‖AY‖₄⁴.
pub fn g_det(a: &UnitaryMatrix, y: &SampleSet) -> Result<f64> {
    check_dims(a.dim(), y.dim())?;
    Ok(l4_norm4(&a.matrix().mul(y.matrix())))
}

/// Per-column values ‖A·y_m‖₄⁴, in column order.
pub fn per_sample_l4(a: &UnitaryMatrix, y: &SampleSet) -> Result<Vec<f64>> {
    check_dims(a.dim(), y.dim())?;
    let x = a.matrix().mul(y.matrix());
    Ok((0..y.len())
        .map(|m| x.col(m).iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum())
        .collect())
}

/// Monte-Carlo estimate of the expected objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Standard error of the mean; undefined (None) for a single draw.
    pub stderr: Option<f64>,
}

/// Unbiased sample mean of ‖A·y‖₄⁴ over `samples` draws with its
/// standard error. Deterministic per (model, seed).
pub fn g_mc(
    a: &UnitaryMatrix,
    model: &StochasticModel,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_dims(a.dim(), model.dim())?;
    if samples == 0 {
        return Err(Error::InvalidArguments(
            "Monte-Carlo sample count must be positive".into(),
        ));
    }
    let set = model.sample(samples, seed)?;
    let values = per_sample_l4(a, &set)?;
    let mean = values.iter().sum::<f64>() / samples as f64;
    let stderr = if samples > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (samples as f64 - 1.0);
        Some((var / samples as f64).sqrt())
    } else {
        None
    };
    Ok(McEstimate { mean, stderr })
}

/// Exact expected objective under the single-path model with gain
/// magnitude `c_mag`: |c|⁴·Σ_i Σ_{p−q+r=n} A_{i,p}·A*_{i,q}·A_{i,r}·A*_{i,n}.
pub fn g_analytic_l1(a: &UnitaryMatrix, c_mag: f64) -> f64 {
    g_analytic_l1_scaled(a.matrix(), c_mag.powi(4))
}

fn g_analytic_l1_scaled(a: &CMatrix, c4: f64) -> f64 {
    let b = a.rows();
    let mut total: Complex64 = Complex::ZERO;
    for i in 0..b {
        let row = a.row(i);
        let mut acc: Complex64 = Complex::ZERO;
        for p in 0..b {
            for q in 0..b {
                let pq = row[p] * row[q].conj();
                // r = n − p + q stays in range for n in [lo, hi).
                let lo = p.saturating_sub(q);
                let hi = (b + p - q).min(b);
                for n in lo..hi {
                    let r = n + q - p;
                    acc += pq * row[r] * row[n].conj();
                }
            }
        }
        total += acc;
    }
    debug_assert!(
        total.im.abs() <= 1e-10 * (1.0 + total.re.abs()),
        "imaginary residual {:.3e}",
        total.im
    );
    c4 * total.re
}

/// Gradient of the dataset objective: Σ_m 2(|x_m|∘²∘x_m)·y_mᴴ with
/// x_m = A·y_m.
pub fn grad_gdet(a: &UnitaryMatrix, y: &SampleSet) -> Result<CMatrix> {
    check_dims(a.dim(), y.dim())?;
    Ok(grad_samples(a.matrix(), y))
}

fn grad_samples(a: &CMatrix, y: &SampleSet) -> CMatrix {
    let n = a.rows();
    let x = a.mul(y.matrix());
    let mut g = CMatrix::zeros(n, n);
    for m in 0..y.len() {
        let col = y.column(m);
        for i in 0..n {
            let xi = x[(i, m)];
            let stretched = xi * xi.norm_sqr() * 2.0;
            let grow = g.row_mut(i);
            for (t, &yt) in col.iter().enumerate() {
                grow[t] += stretched * yt.conj();
            }
        }
    }
    g
}

/// Exact gradient under the single-path model:
/// entry (i, n) = 2|c|⁴·Σ_{p−q+r=n} A_{i,p}·A*_{i,q}·A_{i,r}.
pub fn grad_analytic_l1(a: &UnitaryMatrix, c_mag: f64) -> CMatrix {
    grad_analytic_scaled(a.matrix(), c_mag.powi(4))
}

fn grad_analytic_scaled(a: &CMatrix, c4: f64) -> CMatrix {
    let b = a.rows();
    let mut g = CMatrix::zeros(b, b);
    for i in 0..b {
        let row = a.row(i);
        for n in 0..b {
            let mut acc: Complex64 = Complex::ZERO;
            for p in 0..b {
                for q in 0..b {
                    let r = n + q;
                    if r >= p && r - p < b {
                        acc += row[p] * row[q].conj() * row[r - p];
                    }
                }
            }
            g[(i, n)] = acc * 2.0 * c4;
        }
    }
    g
}

/// First and second derivatives of the objective along the Givens curve
/// α ↦ g(G(i,k,α)·A) at α = 0, for one index pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairDerivatives {
    pub i: usize,
    pub k: usize,
    pub first: f64,
    pub second: f64,
}

/// Derivatives for every pair i > k, with the extremes used by
/// fixed-point and local-optimality verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    #[serde(rename = "b")]
    pub dim: usize,
    pub pairs: Vec<PairDerivatives>,
    /// max over pairs of |first|.
    pub max_abs_first: f64,
    /// max over pairs of second (local maxima need this negative).
    pub max_second: f64,
}

impl DerivativeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Evaluates the coordinate-ascent derivative conditions at `a` for all
/// pairs i > k:
///
/// first(i,k)  = 4·E[Re{x_i·x*_k}·(|x_i|² − |x_k|²)]
/// second(i,k) = 4·E[2Re{x²_k·(x*_i)²} + 4|x_i|²|x_k|² − |x_k|⁴ − |x_i|⁴]
///
/// with x = A·y and the expectation taken per the spec (sum for
/// datasets, mean for Monte-Carlo, exact for the single-path model).
pub fn ca_derivatives(a: &UnitaryMatrix, spec: &ObjectiveSpec) -> Result<DerivativeReport> {
    check_dims(a.dim(), spec.dim())?;
    let backend = spec.resolve()?;
    Ok(ca_derivatives_backend(a, &backend))
}

pub(crate) fn ca_derivatives_backend(a: &UnitaryMatrix, backend: &Backend) -> DerivativeReport {
    let n = a.dim();
    let x_cache = match backend {
        Backend::Samples { set, .. } => Some(a.matrix().mul(set.matrix())),
        Backend::Analytic { .. } => None,
    };
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    let mut max_abs_first: f64 = 0.0;
    let mut max_second = f64::NEG_INFINITY;
    for k in 0..n {
        for i in k + 1..n {
            let m = pair_moments(a, backend, x_cache.as_ref(), i, k);
            let first = m.first_derivative();
            let second = m.second_derivative();
            max_abs_first = max_abs_first.max(first.abs());
            max_second = max_second.max(second);
            pairs.push(PairDerivatives {
                i,
                k,
                first,
                second,
            });
        }
    }
    DerivativeReport {
        dim: n,
        pairs,
        max_abs_first,
        max_second,
    }
}

pub(crate) fn pair_moments(
    a: &UnitaryMatrix,
    backend: &Backend,
    x_cache: Option<&CMatrix>,
    i: usize,
    k: usize,
) -> PairMoments {
    match backend {
        Backend::Samples { mean, .. } => {
            let x = x_cache.expect("sample backend requires the transformed cache");
            PairMoments::from_rows(x.row(i), x.row(k), *mean)
        }
        Backend::Analytic { c4, .. } => PairMoments::analytic_l1(a.matrix(), i, k, *c4),
    }
}

/// Closed-form second derivative of the expected objective at the DFT
/// under the unit-gain single-path model:
/// d₁(i,k) = (8/B²)·(3B·csc²(π(i−k)/B) − (2B³+7B)/3).
///
/// Negative for every valid pair — the DFT sits at a local maximum along
/// every Givens coordinate.
pub fn d1_closed_form(b: usize, i: usize, k: usize) -> Result<f64> {
    if b < 2 {
        return Err(Error::InvalidDimension(
            "closed form needs dimension at least 2".into(),
        ));
    }
    if i <= k || i >= b {
        return Err(Error::InvalidArguments(format!(
            "need b > i > k (zero-based), got b = {b}, i = {i}, k = {k}"
        )));
    }
    let bf = b as f64;
    let s = (std::f64::consts::PI * (i - k) as f64 / bf).sin();
    Ok(8.0 / (bf * bf) * (3.0 * bf / (s * s) - (2.0 * bf.powi(3) + 7.0 * bf) / 3.0))
}

fn check_dims(a_dim: usize, data_dim: usize) -> Result<()> {
    if a_dim != data_dim {
        return Err(Error::InvalidArguments(format!(
            "transform dimension {a_dim} does not match data dimension {data_dim}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{dft_matrix, random_unitary, GivensRotation};
    use crate::models::sample_multipath;
    

    fn unit_multipath(b: usize, seed: u64) -> MultipathModel {
        MultipathModel::new(b, vec![Complex::ONE], seed).unwrap()
    }

    #[test]
    fn g_det_of_identity_on_identity_is_n() {
        let n = 6;
        let a = UnitaryMatrix::new(CMatrix::identity(n)).unwrap();
        let y = SampleSet::new(CMatrix::identity(n));
        assert!((g_det(&a, &y).unwrap() - n as f64).abs() < 1e-12);
    }

    #[test]
    fn g_det_is_degree_four_homogeneous() {
        let a = random_unitary(4, 1).unwrap();
        let set = sample_multipath(&unit_multipath(4, 2), 5).unwrap();
        let c = Complex::new(0.3, -1.2);
        let scaled = SampleSet::new(set.matrix().scale(c));
        let g1 = g_det(&a, &set).unwrap();
        let g2 = g_det(&a, &scaled).unwrap();
        assert!((g2 - c.norm().powi(4) * g1).abs() < 1e-9 * g2.abs());
    }

    #[test]
    fn g_det_matches_per_column_oracle() {
        let a = random_unitary(4, 3).unwrap();
        let set = sample_multipath(&unit_multipath(4, 5), 3).unwrap();
        let direct: f64 = (0..set.len())
            .map(|m| {
                a.matrix()
                    .matvec(&set.column(m))
                    .iter()
                    .map(|z| z.norm_sqr() * z.norm_sqr())
                    .sum::<f64>()
            })
            .sum();
        let g = g_det(&a, &set).unwrap();
        assert!((g - direct).abs() <= 1e-12 * direct.abs());
    }

    #[test]
    fn g_det_rejects_dimension_mismatch() {
        let a = random_unitary(4, 3).unwrap();
        let set = sample_multipath(&unit_multipath(5, 5), 3).unwrap();
        assert!(g_det(&a, &set).is_err());
    }

    #[test]
    fn analytic_l1_known_values() {
        // Frozen from tuple enumeration: Σ_n #{p−q+r=n} equals 6 for
        // B = 2 and 19 for B = 3, giving 6/2 and 19/3 after the 1/B²
        // flat-modulus factor times B rows.
        let f2 = dft_matrix(2).unwrap();
        assert!((g_analytic_l1(&f2, 1.0) - 3.0).abs() < 1e-12);
        let f3 = dft_matrix(3).unwrap();
        assert!((g_analytic_l1(&f3, 1.0) - 19.0 / 3.0).abs() < 1e-12);
        let f1 = dft_matrix(1).unwrap();
        assert!((g_analytic_l1(&f1, 2.0) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_l1_row_contributions_are_symmetric_for_dft() {
        let b = 8;
        let f = dft_matrix(b).unwrap();
        let total = g_analytic_l1(&f, 1.0);
        // Each DFT row contributes identically.
        let single_row = {
            let row = f.matrix().row(0);
            let mut acc: Complex64 = Complex::ZERO;
            for p in 0..b {
                for q in 0..b {
                    for n in 0..b {
                        if n + q >= p && n + q - p < b {
                            acc += row[p] * row[q].conj() * row[n + q - p] * row[n].conj();
                        }
                    }
                }
            }
            acc.re
        };
        assert!((total - b as f64 * single_row).abs() < 1e-12 * total);
    }

    #[test]
    fn analytic_l1_agrees_with_monte_carlo() {
        let a = random_unitary(5, 8).unwrap();
        let exact = g_analytic_l1(&a, 1.0);
        let est = g_mc(
            &a,
            &StochasticModel::Multipath(unit_multipath(5, 0)),
            200_000,
            17,
        )
        .unwrap();
        let stderr = est.stderr.unwrap();
        assert!(
            (est.mean - exact).abs() <= 4.0 * stderr,
            "exact {exact}, mc {} ± {stderr}",
            est.mean
        );
    }

    #[test]
    fn mc_single_draw_has_undefined_stderr() {
        let a = dft_matrix(3).unwrap();
        let est = g_mc(
            &a,
            &StochasticModel::Multipath(unit_multipath(3, 1)),
            1,
            5,
        )
        .unwrap();
        assert!(est.stderr.is_none());
    }

    #[test]
    fn mc_stderr_scales_as_inverse_sqrt() {
        let a = dft_matrix(4).unwrap();
        let model = StochasticModel::Multipath(unit_multipath(4, 2));
        for seed in [3, 11, 42] {
            let small = g_mc(&a, &model, 20_000, seed).unwrap().stderr.unwrap();
            let big = g_mc(&a, &model, 40_000, seed + 100).unwrap().stderr.unwrap();
            let ratio = big / small;
            let expected = std::f64::consts::FRAC_1_SQRT_2;
            assert!(
                (ratio / expected - 1.0).abs() < 0.2,
                "seed {seed}: ratio {ratio}"
            );
        }
    }

    #[test]
    fn grad_of_identity_on_basis_vector() {
        let a = UnitaryMatrix::new(CMatrix::identity(3)).unwrap();
        let mut col = vec![Complex::ZERO; 3];
        col[0] = Complex::ONE;
        let y = SampleSet::from_columns(&[col]).unwrap();
        let g = grad_gdet(&a, &y).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let want = if i == 0 && k == 0 { 2.0 } else { 0.0 };
                assert!((g[(i, k)] - Complex::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_column_contributes_nothing() {
        let a = random_unitary(3, 4).unwrap();
        let col = vec![Complex::new(0.4, 0.1), Complex::ZERO, Complex::new(0.0, 1.0)];
        let zero = vec![Complex::ZERO; 3];
        let with = grad_gdet(&a, &SampleSet::from_columns(&[col.clone(), zero]).unwrap()).unwrap();
        let without = grad_gdet(&a, &SampleSet::from_columns(&[col]).unwrap()).unwrap();
        assert!(with.frob_dist(&without) < 1e-15);
    }

    /// Central finite difference of g along re/im of each entry, combined
    /// per the complex gradient convention ∇ = ½(∂/∂re + j·∂/∂im).
    fn fd_gradient(a: &UnitaryMatrix, y: &SampleSet, h: f64) -> CMatrix {
        let n = a.dim();
        CMatrix::from_fn(n, n, |i, k| {
            let eval = |dre: f64, dim: f64| {
                let mut m = a.matrix().clone();
                m[(i, k)] += Complex::new(dre, dim);
                l4_norm4(&m.mul(y.matrix()))
            };
            let dre = (eval(h, 0.0) - eval(-h, 0.0)) / (2.0 * h);
            let dim = (eval(0.0, h) - eval(0.0, -h)) / (2.0 * h);
            Complex::new(dre / 2.0, dim / 2.0)
        })
    }

    #[test]
    fn grad_matches_finite_differences() {
        for seed in 0..3 {
            let n = 5;
            let a = random_unitary(n, seed).unwrap();
            let y = sample_multipath(&unit_multipath(n, seed + 50), 4).unwrap();
            let g = grad_gdet(&a, &y).unwrap();
            let fd = fd_gradient(&a, &y, 1e-5);
            let rel = g.frob_dist(&fd) / g.frob_norm();
            assert!(rel < 1e-5, "seed {seed}: rel {rel:e}");
        }
    }

    #[test]
    fn dft_is_first_order_stationary_under_analytic_l1() {
        for b in [2, 3, 4, 8, 16] {
            let f = dft_matrix(b).unwrap();
            let spec = ObjectiveSpec::AnalyticL1 {
                dim: b,
                gain_mag: 1.0,
            };
            let report = ca_derivatives(&f, &spec).unwrap();
            assert!(
                report.max_abs_first <= 1e-10,
                "b = {b}: {}",
                report.max_abs_first
            );
        }
    }

    #[test]
    fn one_sparse_dataset_has_zero_first_derivatives() {
        let n = 4;
        let a = UnitaryMatrix::new(CMatrix::identity(n)).unwrap();
        let mut col = vec![Complex::ZERO; n];
        col[0] = Complex::ONE;
        let spec = ObjectiveSpec::Dataset(SampleSet::from_columns(&[col]).unwrap());
        let report = ca_derivatives(&a, &spec).unwrap();
        assert!(report.max_abs_first < 1e-15);
    }

    #[test]
    fn ca_first_derivative_matches_finite_differences() {
        let n = 5;
        for seed in 0..3 {
            let a = random_unitary(n, 30 + seed).unwrap();
            let y = sample_multipath(&unit_multipath(n, 60 + seed), 6).unwrap();
            let spec = ObjectiveSpec::Dataset(y.clone());
            let report = ca_derivatives(&a, &spec).unwrap();
            let h = 1e-4;
            for pd in &report.pairs {
                let eval = |alpha: f64| {
                    let g = GivensRotation::new(pd.i, pd.k, alpha).unwrap();
                    let rotated = crate::matkit::apply_update(
                        &a,
                        &g,
                        &crate::matkit::PhaseShift::new(pd.i, 0.0).unwrap(),
                        &crate::matkit::PhaseShift::new(pd.k, 0.0).unwrap(),
                    )
                    .unwrap();
                    g_det(&rotated, &y).unwrap()
                };
                let fd = (eval(h) - eval(-h)) / (2.0 * h);
                let scale = pd.first.abs().max(1e-6);
                assert!(
                    (pd.first - fd).abs() / scale < 1e-6,
                    "pair ({}, {}): analytic {} vs fd {fd}",
                    pd.i,
                    pd.k,
                    pd.first
                );
            }
        }
    }

    #[test]
    fn d1_spot_values() {
        // Frozen from quadrature of the second-derivative expression.
        assert!((d1_closed_form(2, 1, 0).unwrap() + 8.0).abs() < 1e-12);
        assert!((d1_closed_form(4, 2, 0).unwrap() + 20.0).abs() < 1e-12);
        assert!((d1_closed_form(4, 3, 1).unwrap() + 20.0).abs() < 1e-12);
    }

    #[test]
    fn d1_negative_for_all_pairs_up_to_64() {
        for b in 2..=64 {
            for k in 0..b {
                for i in k + 1..b {
                    let v = d1_closed_form(b, i, k).unwrap();
                    assert!(v < 0.0, "d1({b}, {i}, {k}) = {v}");
                }
            }
        }
    }

    #[test]
    fn d1_rejects_bad_indices() {
        assert!(d1_closed_form(4, 2, 2).is_err());
        assert!(d1_closed_form(1, 0, 0).is_err());
        assert!(d1_closed_form(4, 4, 1).is_err());
    }

    #[test]
    fn analytic_second_derivatives_match_closed_form_at_dft() {
        for b in [2, 3, 5, 8] {
            let f = dft_matrix(b).unwrap();
            let spec = ObjectiveSpec::AnalyticL1 {
                dim: b,
                gain_mag: 1.0,
            };
            let report = ca_derivatives(&f, &spec).unwrap();
            for pd in &report.pairs {
                let want = d1_closed_form(b, pd.i, pd.k).unwrap();
                assert!(
                    ((pd.second - want) / want).abs() < 1e-10,
                    "b {b} pair ({}, {}): {} vs {want}",
                    pd.i,
                    pd.k,
                    pd.second
                );
            }
        }
    }

    #[test]
    fn phase_and_permutation_invariance_of_g_det() {
        let n = 4;
        let a = random_unitary(n, 7).unwrap();
        let y = sample_multipath(&unit_multipath(n, 9), 5).unwrap();
        let base = g_det(&a, &y).unwrap();

        // Row phases leave each |x_i| unchanged.
        let mut rowphase = a.matrix().clone();
        for i in 0..n {
            let ph = Complex64::from_polar(1.0, 0.7 * (i as f64 + 1.0));
            for k in 0..n {
                rowphase[(i, k)] *= ph;
            }
        }
        let g_phase = g_det(&UnitaryMatrix::new(rowphase).unwrap(), &y).unwrap();
        assert_eq!(g_phase, base);

        // Row permutation re-orders |x| entries.
        let mut permuted = CMatrix::zeros(n, n);
        let perm = [2, 0, 3, 1];
        for i in 0..n {
            for k in 0..n {
                permuted[(perm[i], k)] = a.matrix()[(i, k)];
            }
        }
        let g_perm = g_det(&UnitaryMatrix::new(permuted).unwrap(), &y).unwrap();
        assert_eq!(g_perm, base);
    }
}
