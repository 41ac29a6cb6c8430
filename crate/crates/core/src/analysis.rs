//! Scripted verification experiments.
//!
//! Each experiment evaluates one theoretical claim numerically over a
//! range of dimensions and produces a machine-readable report:
//!
//! - `verify_dft_msp`: the DFT is a fixed point of the MSP iteration
//!   under the multipath model (exact gradient for one path, Monte-Carlo
//!   with a propagated noise bound otherwise).
//! - `verify_dft_ca`: at the DFT, all first derivatives along Givens
//!   planes vanish and all second derivatives are negative, matching the
//!   csc² closed form.
//! - `scan_dct`: for each B, some Givens plane at the DCT-II has a
//!   nonzero first derivative under the sinusoid model — the DCT is not
//!   a fixed point.
//!
//! Reports are deterministic under fixed seeds; per-dimension work runs
//! in parallel and is assembled in dimension order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::learn::check_msp_fixed_point;
use crate::matkit::{dft_matrix, CMatrix, UnitaryMatrix};
use crate::models::{sample_multipath_seeded, MultipathModel, SampleSet};
use crate::objective::{
    ca_derivatives, d1_closed_form, dct_first_derivative, g_det, grad_analytic_l1, per_sample_l4,
    ObjectiveSpec,
};
use crate::Complex64;

/// Residual tolerance for the exact single-path fixed-point check.
pub const DFT_MSP_ANALYTIC_TOL: f64 = 1e-9;
/// First-derivative tolerance for the local-optimality check at the DFT.
pub const DFT_CA_FIRST_TOL: f64 = 1e-10;
/// Relative mismatch allowed between computed second derivatives and the
/// closed form.
pub const DFT_CA_MATCH_TOL: f64 = 1e-6;
/// A first derivative above this witnesses that the DCT is not a fixed
/// point.
pub const DCT_SCAN_THRESHOLD: f64 = 1e-6;
/// Monte-Carlo verdicts use mean ± this many propagated standard errors.
pub const MC_SIGMA_FACTOR: f64 = 5.0;

/// Outcome for one dimension within a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerDim {
    pub b: usize,
    /// Named scalar results (residuals, bounds, extremes).
    pub metrics: BTreeMap<String, f64>,
    /// Index pair (i, k) responsible for the decisive metric, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_pair: Option<[usize; 2]>,
    pub passed: bool,
}

/// Aggregated verdict for one claim over a dimension range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claim: String,
    pub b_range: Vec<usize>,
    pub per_b: Vec<PerDim>,
    pub passed: bool,
}

impl VerificationReport {
    fn assemble(claim: &str, per_b: Vec<PerDim>) -> Self {
        Self {
            claim: claim.to_string(),
            b_range: per_b.iter().map(|p| p.b).collect(),
            passed: per_b.iter().all(|p| p.passed),
            per_b,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text pass/fail table, one row per dimension.
    pub fn render_table(&self) -> String {
        let mut out = format!("claim: {}\n", self.claim);
        for p in &self.per_b {
            let metrics: Vec<String> = p
                .metrics
                .iter()
                .map(|(k, v)| format!("{k}={v:.3e}"))
                .collect();
            let pair = p
                .worst_pair
                .map(|[i, k]| format!(" pair=({i},{k})"))
                .unwrap_or_default();
            out.push_str(&format!(
                "  B={:<4} {}  {}{}\n",
                p.b,
                if p.passed { "pass" } else { "FAIL" },
                metrics.join(" "),
                pair
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.passed { "pass" } else { "FAIL" }
        ));
        out
    }
}

/// Gradient evaluation mode for the MSP fixed-point check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DftMspMode {
    /// Exact gradient; requires a single path.
    Analytic,
    /// Sample-mean gradient over `samples` draws with a propagated
    /// noise bound on the residual.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Checks that the DFT is a fixed point of the MSP iteration under the
/// multipath model with the given path gains.
pub fn verify_dft_msp(
    b_list: &[usize],
    gains: &[Complex64],
    mode: DftMspMode,
) -> Result<VerificationReport> {
    if b_list.is_empty() {
        return Err(Error::InvalidArguments("empty dimension list".into()));
    }
    if gains.is_empty() {
        return Err(Error::InvalidArguments("need at least one path gain".into()));
    }
    if matches!(mode, DftMspMode::Analytic) && gains.len() != 1 {
        return Err(Error::InvalidArguments(
            "the analytic gradient covers exactly one path; use Monte-Carlo for more".into(),
        ));
    }
    let per_b: Result<Vec<PerDim>> = b_list
        .par_iter()
        .map(|&b| -> Result<PerDim> {
            let f = dft_matrix(b)?;
            let mut metrics = BTreeMap::new();
            let passed = match mode {
                DftMspMode::Analytic => {
                    let grad = grad_analytic_l1(&f, gains[0].norm());
                    let v = check_msp_fixed_point(&f, &grad, DFT_MSP_ANALYTIC_TOL);
                    metrics.insert("residual_left".into(), v.residual_left);
                    metrics.insert("residual_right".into(), v.residual_right);
                    metrics.insert("tol".into(), v.tol);
                    v.is_fixed
                }
                DftMspMode::MonteCarlo { samples, seed } => {
                    let model = MultipathModel::new(b, gains.to_vec(), seed)?;
                    let set = sample_multipath_seeded(&model, samples, seed)?;
                    let (grad, entry_var) = mc_gradient_with_variance(&f, &set);
                    let v = check_msp_fixed_point(&f, &grad, DFT_MSP_ANALYTIC_TOL);
                    let norm = grad.frob_norm();
                    let bound_left = MC_SIGMA_FACTOR
                        * residual_noise_sigma(&entry_var, samples, f.matrix(), false)
                        / norm;
                    let bound_right = MC_SIGMA_FACTOR
                        * residual_noise_sigma(&entry_var, samples, f.matrix(), true)
                        / norm;
                    metrics.insert("residual_left".into(), v.residual_left);
                    metrics.insert("residual_right".into(), v.residual_right);
                    metrics.insert("bound_left".into(), bound_left);
                    metrics.insert("bound_right".into(), bound_right);
                    v.residual_left <= bound_left || v.residual_right <= bound_right
                }
            };
            Ok(PerDim {
                b,
                metrics,
                worst_pair: None,
                passed,
            })
        })
        .collect();
    Ok(VerificationReport::assemble("dft-msp", per_b?))
}

/// Sample-mean MSP gradient together with the per-entry variance of a
/// single draw (sum of real and imaginary variances).
fn mc_gradient_with_variance(a: &UnitaryMatrix, set: &SampleSet) -> (CMatrix, Vec<Vec<f64>>) {
    let n = a.dim();
    let s = set.len();
    let x = a.matrix().mul(set.matrix());
    let mut mean = CMatrix::zeros(n, n);
    let mut m2 = vec![vec![0.0f64; n]; n];
    // Welford over samples, per entry.
    for m in 0..s {
        let y = set.column(m);
        let count = (m + 1) as f64;
        for i in 0..n {
            let xi = x[(i, m)];
            let stretched = xi * xi.norm_sqr() * 2.0;
            for (t, &yt) in y.iter().enumerate() {
                let g = stretched * yt.conj();
                let delta = g - mean[(i, t)];
                mean[(i, t)] += delta / count;
                let delta2 = g - mean[(i, t)];
                m2[i][t] += delta.re * delta2.re + delta.im * delta2.im;
            }
        }
    }
    let denom = (s.max(2) - 1) as f64;
    for row in m2.iter_mut() {
        for v in row.iter_mut() {
            *v /= denom;
        }
    }
    (mean, m2)
}

/// Standard deviation of the fixed-point residual under the hypothesis
/// that the true residual is zero: propagates the single-draw per-entry
/// variance of the gradient (divided by the sample count for the mean)
/// through R = Ĝ·Aᴴ (or Aᴴ·Ĝ), then collects the off-diagonal entries
/// in full and the diagonal at half weight, since only its imaginary
/// part enters the residual.
fn residual_noise_sigma(
    entry_var: &[Vec<f64>],
    samples: usize,
    a: &CMatrix,
    right_side: bool,
) -> f64 {
    let n = a.rows();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut var = 0.0;
            for t in 0..n {
                var += if right_side {
                    // R' = Aᴴ·Ĝ: R'_ij = Σ_t conj(A_ti)·Ĝ_tj
                    entry_var[t][j] * a[(t, i)].norm_sqr()
                } else {
                    // R = Ĝ·Aᴴ: R_ij = Σ_t Ĝ_it·conj(A_jt)
                    entry_var[i][t] * a[(j, t)].norm_sqr()
                };
            }
            var /= samples as f64;
            total += if i == j { 0.5 * var } else { var };
        }
    }
    total.sqrt()
}

/// Checks local optimality of the DFT along every Givens plane under the
/// exact single-path objective, cross-checking second derivatives
/// against the csc² closed form.
pub fn verify_dft_ca(b_list: &[usize]) -> Result<VerificationReport> {
    if b_list.is_empty() {
        return Err(Error::InvalidArguments("empty dimension list".into()));
    }
    if b_list.iter().any(|&b| b < 2) {
        return Err(Error::InvalidDimension(
            "local-optimality check needs B ≥ 2".into(),
        ));
    }
    let per_b: Result<Vec<PerDim>> = b_list
        .par_iter()
        .map(|&b| -> Result<PerDim> {
            let f = dft_matrix(b)?;
            let spec = ObjectiveSpec::AnalyticL1 {
                dim: b,
                gain_mag: 1.0,
            };
            let report = ca_derivatives(&f, &spec)?;
            let mut worst_mismatch = 0.0f64;
            let mut worst_pair = None;
            for pd in &report.pairs {
                let want = d1_closed_form(b, pd.i, pd.k)?;
                let rel = ((pd.second - want) / want).abs();
                if rel > worst_mismatch {
                    worst_mismatch = rel;
                    worst_pair = Some([pd.i, pd.k]);
                }
            }
            let all_negative = report.pairs.iter().all(|pd| pd.second < 0.0);
            let mut metrics = BTreeMap::new();
            metrics.insert("max_abs_first".into(), report.max_abs_first);
            metrics.insert("max_second".into(), report.max_second);
            metrics.insert("max_rel_mismatch".into(), worst_mismatch);
            Ok(PerDim {
                b,
                metrics,
                worst_pair,
                passed: report.max_abs_first <= DFT_CA_FIRST_TOL
                    && all_negative
                    && worst_mismatch <= DFT_CA_MATCH_TOL,
            })
        })
        .collect();
    Ok(VerificationReport::assemble("dft-ca", per_b?))
}

/// Scans every Givens plane at the DCT-II for a nonzero first derivative
/// under the sinusoid model. A dimension passes when some pair exceeds
/// the witness threshold.
pub fn scan_dct(b_list: &[usize]) -> Result<VerificationReport> {
    if b_list.is_empty() {
        return Err(Error::InvalidArguments("empty dimension list".into()));
    }
    if b_list.iter().any(|&b| b < 3) {
        return Err(Error::InvalidDimension("the DCT scan starts at B = 3".into()));
    }
    let per_b: Result<Vec<PerDim>> = b_list
        .par_iter()
        .map(|&b| -> Result<PerDim> {
            let mut max_abs = 0.0f64;
            let mut witness = None;
            for k in 0..b {
                for i in k + 1..b {
                    let v = dct_first_derivative(b, i, k)?.abs();
                    if v > max_abs {
                        max_abs = v;
                        witness = Some([i, k]);
                    }
                }
            }
            let mut metrics = BTreeMap::new();
            metrics.insert("max_abs_first".into(), max_abs);
            Ok(PerDim {
                b,
                metrics,
                worst_pair: witness,
                passed: max_abs > DCT_SCAN_THRESHOLD,
            })
        })
        .collect();
    Ok(VerificationReport::assemble("dct-scan", per_b?))
}

/// Side-by-side l4 comparison of two transforms on a test set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformComparison {
    /// g(a2, test) / g(a1, test).
    pub ratio: f64,
    /// Per-sample l4 values under each transform.
    pub per_sample: Vec<PerSampleL4>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerSampleL4 {
    pub a1: f64,
    pub a2: f64,
}

pub fn compare_transforms(
    a1: &UnitaryMatrix,
    a2: &UnitaryMatrix,
    test: &SampleSet,
) -> Result<TransformComparison> {
    let g1 = g_det(a1, test)?;
    let g2 = g_det(a2, test)?;
    let s1 = per_sample_l4(a1, test)?;
    let s2 = per_sample_l4(a2, test)?;
    Ok(TransformComparison {
        ratio: g2 / g1,
        per_sample: s1
            .into_iter()
            .zip(s2)
            .map(|(a1, a2)| PerSampleL4 { a1, a2 })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::{ca_run, CaConfig};
    use crate::matkit::{apply_update, random_cp, GivensRotation, PhaseShift};
    use crate::models::{sample_multipath, MuMimoScene};
    use num_complex::Complex;

    #[test]
    fn dft_msp_analytic_passes_for_small_dims() {
        let report = verify_dft_msp(
            &[2, 4, 8],
            &[Complex::ONE],
            DftMspMode::Analytic,
        )
        .unwrap();
        assert!(report.passed, "{}", report.render_table());
        for p in &report.per_b {
            let resid = p.metrics["residual_left"].min(p.metrics["residual_right"]);
            assert!(resid <= 1e-9);
        }
    }

    #[test]
    fn dft_msp_analytic_rejects_multiple_paths() {
        let gains = vec![Complex::ONE, Complex::ONE];
        assert!(verify_dft_msp(&[4], &gains, DftMspMode::Analytic).is_err());
    }

    #[test]
    fn dft_msp_mc_two_paths_passes_within_noise() {
        let gains = vec![Complex::ONE, Complex::new(0.5, 0.2)];
        let report = verify_dft_msp(
            &[4],
            &gains,
            DftMspMode::MonteCarlo {
                samples: 200_000,
                seed: 11,
            },
        )
        .unwrap();
        assert!(report.passed, "{}", report.render_table());
    }

    #[test]
    fn perturbed_dft_fails_the_fixed_point_check() {
        let b = 8;
        let f = dft_matrix(b).unwrap();
        let g = GivensRotation::new(3, 1, 1e-2).unwrap();
        let perturbed = apply_update(
            &f,
            &g,
            &PhaseShift::new(3, 0.0).unwrap(),
            &PhaseShift::new(1, 0.0).unwrap(),
        )
        .unwrap();
        let grad = grad_analytic_l1(&perturbed, 1.0);
        let v = check_msp_fixed_point(&perturbed, &grad, DFT_MSP_ANALYTIC_TOL);
        assert!(!v.is_fixed, "residuals {} / {}", v.residual_left, v.residual_right);
    }

    #[test]
    fn dft_ca_report_passes_with_closed_form_match() {
        let report = verify_dft_ca(&[2, 3, 4, 8, 12]).unwrap();
        assert!(report.passed, "{}", report.render_table());
        // B = 2 spot value: the single pair has second derivative −8.
        let b2 = &report.per_b[0];
        assert!(b2.metrics["max_second"] + 8.0 < 1e-9);
    }

    #[test]
    fn dft_ca_all_pairs_negative_for_b3() {
        let f = dft_matrix(3).unwrap();
        let spec = ObjectiveSpec::AnalyticL1 {
            dim: 3,
            gain_mag: 1.0,
        };
        let report = ca_derivatives(&f, &spec).unwrap();
        assert_eq!(report.pairs.len(), 3);
        for pd in &report.pairs {
            assert!(pd.second < 0.0);
        }
    }

    #[test]
    fn dct_scan_finds_witnesses() {
        let report = scan_dct(&[3, 4, 5, 6, 7, 8]).unwrap();
        assert!(report.passed, "{}", report.render_table());
        for p in &report.per_b {
            assert!(p.worst_pair.is_some());
        }
    }

    #[test]
    fn dct_scan_rejects_b_below_three() {
        assert!(scan_dct(&[2, 3]).is_err());
    }

    #[test]
    fn comparison_of_identical_transforms_is_unity() {
        let f = dft_matrix(6).unwrap();
        let m = crate::models::MultipathModel::new(6, vec![Complex::ONE], 4).unwrap();
        let set = sample_multipath(&m, 10).unwrap();
        let cmp = compare_transforms(&f, &f, &set).unwrap();
        assert_eq!(cmp.ratio, 1.0);
    }

    #[test]
    fn comparison_is_invariant_under_cp_composition() {
        let b = 5;
        let f = dft_matrix(b).unwrap();
        let p = random_cp(b, 3).unwrap();
        let composed = UnitaryMatrix::new(p.matrix().mul(f.matrix())).unwrap();
        let m = crate::models::MultipathModel::new(b, vec![Complex::ONE], 9).unwrap();
        let set = sample_multipath(&m, 12).unwrap();
        let cmp = compare_transforms(&f, &composed, &set).unwrap();
        assert!((cmp.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn learned_transform_does_not_lose_to_its_init_on_train() {
        let b = 8;
        let scene = MuMimoScene::with_defaults(b, 2, 2, 21).unwrap();
        let channels = crate::models::synth_scene_channels(&scene, 12).unwrap();
        let cols: Vec<Vec<Complex64>> = channels
            .iter()
            .flat_map(|h| (0..h.cols()).map(|u| h.col(u)).collect::<Vec<_>>())
            .collect();
        let train = SampleSet::from_columns(&cols).unwrap();
        let f = dft_matrix(b).unwrap();
        let mut cfg = CaConfig::new(f.clone());
        cfg.max_sweeps = 2;
        let (learned, _) = ca_run(&cfg, &ObjectiveSpec::Dataset(train.clone())).unwrap();
        let cmp = compare_transforms(&f, &learned, &train).unwrap();
        assert!(cmp.ratio >= 1.0 - 1e-12, "ratio {}", cmp.ratio);
    }

    #[test]
    fn report_json_includes_claim_and_verdicts() {
        let report = verify_dft_ca(&[2, 3]).unwrap();
        let json = report.to_json();
        assert!(json.contains("\"claim\": \"dft-ca\""));
        assert!(json.contains("\"passed\": true"));
    }

    #[test]
    fn reports_are_bit_identical_across_reruns() {
        // Parallel per-dimension evaluation must not leak scheduling
        // into the results.
        let a = scan_dct(&[3, 4, 5, 6, 7, 8, 9, 10]).unwrap();
        let b = scan_dct(&[3, 4, 5, 6, 7, 8, 9, 10]).unwrap();
        assert_eq!(a.to_json(), b.to_json());

        let gains = vec![Complex::ONE, Complex::new(0.4, -0.1)];
        let mode = DftMspMode::MonteCarlo {
            samples: 30_000,
            seed: 5,
        };
        let a = verify_dft_msp(&[4, 8], &gains, mode).unwrap();
        let b = verify_dft_msp(&[4, 8], &gains, mode).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
