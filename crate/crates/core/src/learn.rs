//! The two learning algorithms and their optimality verdicts.
//!
//! MSP (matching–stretching–projection) is projected gradient ascent with
//! an infinite step: stretch every transformed entry by the cube of its
//! modulus, then snap the result back onto the unitary group through the
//! SVD polar factor. CA (coordinate ascent) instead walks the unitary
//! group intrinsically, maximizing the objective one Givens-rotation
//! plane (plus a relative phase) at a time, which keeps every iterate
//! exactly unitary and makes local optimality checkable from scalar
//! derivatives.
//!
//! The inner CA problem is reduced from (α, β_i, β_k) to (α, Δβ) with
//! Δβ = β_i − β_k: a common phase on the rotated pair leaves all moduli
//! unchanged, so the objective only sees the relative phase.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkit::{
    apply_update, project_unitary, CMatrix, GivensRotation, PhaseShift, UnitaryMatrix,
};
use crate::objective::{
    ca_derivatives_backend, pair_moments, Backend, DerivativeReport, ObjectiveSpec, PairMoments,
};
use crate::rng;
use crate::Complex64;

/// Why a learner stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    /// Iterate movement fell below the step tolerance.
    StepTol,
    /// Objective improvement fell below the tolerance.
    ObjTol,
    /// Iteration budget exhausted.
    MaxIters,
    /// The very first iteration already did not move: the initial point
    /// is a fixed point of the algorithm.
    FixedPoint,
}

/// Objective and movement per iteration (MSP) or per sweep (CA).
///
/// `objective[0]` is the value at the initial transform; entry t+1 and
/// `step_norm[t]` describe iteration t.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnTrace {
    pub objective: Vec<f64>,
    pub step_norm: Vec<f64>,
    pub terminated_by: TerminationReason,
}

impl LearnTrace {
    pub fn iterations(&self) -> usize {
        self.step_norm.len()
    }

    /// JSON with one record per iteration plus the termination reason.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Row {
            iteration: usize,
            objective: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            step_norm: Option<f64>,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            iterations: Vec<Row>,
            terminated_by: &'a TerminationReason,
        }
        let rows = self
            .objective
            .iter()
            .enumerate()
            .map(|(t, &objective)| Row {
                iteration: t,
                objective,
                step_norm: if t == 0 {
                    None
                } else {
                    Some(self.step_norm[t - 1])
                },
            })
            .collect();
        serde_json::to_string_pretty(&Out {
            iterations: rows,
            terminated_by: &self.terminated_by,
        })
        .expect("trace serializes")
    }
}

/// MSP configuration. Defaults: 500 iterations, step tolerance 1e−10 on
/// ‖A_{t+1} − A_t‖_F, relative objective tolerance 1e−12.
#[derive(Debug, Clone)]
pub struct MspConfig {
    pub max_iters: usize,
    pub step_tol: f64,
    pub obj_tol: f64,
    pub init: UnitaryMatrix,
}

impl MspConfig {
    pub fn new(init: UnitaryMatrix) -> Self {
        Self {
            max_iters: 500,
            step_tol: 1e-10,
            obj_tol: 1e-12,
            init,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidArguments("max_iters must be positive".into()));
        }
        if !(self.step_tol > 0.0) || !(self.obj_tol > 0.0) {
            return Err(Error::InvalidArguments("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// One MSP iteration: project the gradient onto the unitary group.
///
/// Errors when the gradient is numerically rank deficient (the polar
/// factor is then not unique).
pub fn msp_step(a: &UnitaryMatrix, grad: &CMatrix) -> Result<UnitaryMatrix> {
    if grad.rows() != a.dim() || grad.cols() != a.dim() {
        return Err(Error::InvalidArguments(format!(
            "gradient is {}x{}, expected {0}x{0} to match the transform",
            grad.rows(),
            grad.cols(),
        )));
    }
    project_unitary(grad)
}

/// One iteration of the sample-free variant: project 2(|A|∘²∘A).
///
/// The cubic stretch pulls each row toward its dominant entries; near a
/// complex permutation matrix the distance contracts cubically.
pub fn msp_pure_step(a: &UnitaryMatrix) -> Result<UnitaryMatrix> {
    let stretched = a.matrix().map(|z| z * z.norm_sqr() * 2.0);
    project_unitary(&stretched)
}

/// Runs MSP until the step or objective tolerance triggers or the
/// iteration budget runs out.
pub fn msp_run(cfg: &MspConfig, spec: &ObjectiveSpec) -> Result<(UnitaryMatrix, LearnTrace)> {
    cfg.validate()?;
    if cfg.init.dim() != spec.dim() {
        return Err(Error::InvalidArguments(format!(
            "init dimension {} does not match objective dimension {}",
            cfg.init.dim(),
            spec.dim()
        )));
    }
    let backend = spec.resolve()?;
    let mut a = cfg.init.clone();
    let mut objective = vec![backend.value(&a)];
    let mut step_norm = Vec::new();
    let mut terminated_by = TerminationReason::MaxIters;

    for t in 0..cfg.max_iters {
        let grad = backend.gradient(&a);
        let next = msp_step(&a, &grad)?;
        let step = next.matrix().frob_dist(a.matrix());
        a = next;
        let value = backend.value(&a);
        let previous = *objective.last().unwrap();
        objective.push(value);
        step_norm.push(step);

        if step <= cfg.step_tol {
            terminated_by = if t == 0 {
                TerminationReason::FixedPoint
            } else {
                TerminationReason::StepTol
            };
            break;
        }
        if (value - previous).abs() <= cfg.obj_tol * previous.abs().max(1.0) {
            terminated_by = TerminationReason::ObjTol;
            break;
        }
    }
    Ok((
        a,
        LearnTrace {
            objective,
            step_norm,
            terminated_by,
        },
    ))
}

/// Order in which CA visits the index pairs of one sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOrder {
    /// k outer, i inner — the order of the product decomposition.
    Lexicographic,
    /// A seeded shuffle, re-drawn per sweep.
    SeededRandom(u64),
}

/// CA configuration. Defaults: 30 sweeps, lexicographic order, inner
/// tolerance 1e−10, sweep improvement tolerance 1e−9.
#[derive(Debug, Clone)]
pub struct CaConfig {
    pub max_sweeps: usize,
    pub sweep_order: SweepOrder,
    pub inner_tol: f64,
    pub improvement_tol: f64,
    pub init: UnitaryMatrix,
}

impl CaConfig {
    pub fn new(init: UnitaryMatrix) -> Self {
        Self {
            max_sweeps: 30,
            sweep_order: SweepOrder::Lexicographic,
            inner_tol: 1e-10,
            improvement_tol: 1e-9,
            init,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_sweeps == 0 {
            return Err(Error::InvalidArguments("max_sweeps must be positive".into()));
        }
        if !(self.inner_tol > 0.0) || !(self.improvement_tol > 0.0) {
            return Err(Error::InvalidArguments("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Solution of the 2-D inner problem for one index pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolution {
    pub alpha: f64,
    /// Relative phase, returned on row i (β_k is fixed at 0).
    pub beta_i: f64,
    pub beta_k: f64,
    /// Objective improvement over (α, Δβ) = (0, 0); never negative.
    pub gain: f64,
}

/// Maximizes the objective over one Givens plane and relative phase.
///
/// A 64×64 grid over (α, Δβ) ∈ (−π/2, π/2] × (−π, π] locates the basin —
/// the objective restricted to a pair is a low-order trigonometric
/// polynomial, so the grid cannot miss it — and damped Newton refinement
/// polishes to `tol`.
pub fn ca_inner(
    a: &UnitaryMatrix,
    i: usize,
    k: usize,
    spec: &ObjectiveSpec,
    tol: f64,
) -> Result<InnerSolution> {
    if k >= i || i >= a.dim() {
        return Err(Error::InvalidArguments(format!(
            "need dim > i > k, got dim = {}, i = {i}, k = {k}",
            a.dim()
        )));
    }
    if a.dim() != spec.dim() {
        return Err(Error::InvalidArguments(
            "transform and objective dimensions differ".into(),
        ));
    }
    let backend = spec.resolve()?;
    let x_cache = match &backend {
        Backend::Samples { set, .. } => Some(a.matrix().mul(set.matrix())),
        Backend::Analytic { .. } => None,
    };
    let m = pair_moments(a, &backend, x_cache.as_ref(), i, k);
    Ok(solve_inner(&m, tol))
}

const GRID_POINTS: usize = 64;

fn solve_inner(m: &PairMoments, tol: f64) -> InnerSolution {
    let origin = m.pair_objective(0.0, 0.0);
    // Differences below the rounding floor of the moment evaluation are
    // symmetry artifacts (e.g. a quarter turn permutes the pair without
    // changing the objective), not improvements.
    let noise_floor = 1e-13 * (1.0 + origin.abs());
    let mut best_a = 0.0;
    let mut best_d = 0.0;
    let mut best_v = origin;
    for ja in 0..GRID_POINTS {
        let alpha = -std::f64::consts::FRAC_PI_2
            + (ja + 1) as f64 * std::f64::consts::PI / GRID_POINTS as f64;
        for jd in 0..GRID_POINTS {
            let dbeta = -std::f64::consts::PI
                + (jd + 1) as f64 * std::f64::consts::TAU / GRID_POINTS as f64;
            let v = m.pair_objective(alpha, dbeta);
            if v > best_v {
                best_v = v;
                best_a = alpha;
                best_d = dbeta;
            }
        }
    }

    let (alpha, dbeta, value) = refine_newton(m, best_a, best_d, best_v, tol);
    if value <= origin + noise_floor {
        return InnerSolution {
            alpha: 0.0,
            beta_i: 0.0,
            beta_k: 0.0,
            gain: 0.0,
        };
    }
    InnerSolution {
        alpha,
        beta_i: dbeta,
        beta_k: 0.0,
        gain: value - origin,
    }
}

/// Damped Newton ascent on the pair objective with central-difference
/// derivatives; the function is smooth and periodic, so a handful of
/// guarded steps reach the requested tolerance.
fn refine_newton(
    m: &PairMoments,
    mut alpha: f64,
    mut dbeta: f64,
    mut value: f64,
    tol: f64,
) -> (f64, f64, f64) {
    let h = 1e-5;
    for _ in 0..60 {
        let f = |a: f64, d: f64| m.pair_objective(a, d);
        let fpa = f(alpha + h, dbeta);
        let fma = f(alpha - h, dbeta);
        let fpd = f(alpha, dbeta + h);
        let fmd = f(alpha, dbeta - h);
        let ga = (fpa - fma) / (2.0 * h);
        let gd = (fpd - fmd) / (2.0 * h);
        let haa = (fpa - 2.0 * value + fma) / (h * h);
        let hdd = (fpd - 2.0 * value + fmd) / (h * h);
        let had = (f(alpha + h, dbeta + h) - f(alpha + h, dbeta - h) - f(alpha - h, dbeta + h)
            + f(alpha - h, dbeta - h))
            / (4.0 * h * h);

        let det = haa * hdd - had * had;
        let (mut da, mut dd) = if det.abs() > 1e-12 && haa < 0.0 {
            (
                -(hdd * ga - had * gd) / det,
                -(haa * gd - had * ga) / det,
            )
        } else {
            // Fall back to a small gradient step when the local Hessian
            // is not usable for ascent.
            (ga * 1e-2, gd * 1e-2)
        };
        // Keep steps inside one period.
        let cap = 0.75;
        let scale = (da.abs().max(dd.abs()) / cap).max(1.0);
        da /= scale;
        dd /= scale;

        let mut accepted = false;
        let mut shrink = 1.0;
        for _ in 0..8 {
            let cand_a = wrap_half_period(alpha + da * shrink);
            let cand_d = wrap_full_period(dbeta + dd * shrink);
            let cand_v = f(cand_a, cand_d);
            if cand_v >= value {
                let moved = (cand_a - alpha).abs().max((cand_d - dbeta).abs());
                alpha = cand_a;
                dbeta = cand_d;
                value = cand_v;
                accepted = true;
                if moved <= tol {
                    return (alpha, dbeta, value);
                }
                break;
            }
            shrink *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (alpha, dbeta, value)
}

/// Wraps into (−π/2, π/2] (the pair objective has period π in α).
fn wrap_half_period(a: f64) -> f64 {
    let mut x = a;
    while x > std::f64::consts::FRAC_PI_2 {
        x -= std::f64::consts::PI;
    }
    while x <= -std::f64::consts::FRAC_PI_2 {
        x += std::f64::consts::PI;
    }
    x
}

/// Wraps into (−π, π].
fn wrap_full_period(d: f64) -> f64 {
    let mut x = d;
    while x > std::f64::consts::PI {
        x -= std::f64::consts::TAU;
    }
    while x <= -std::f64::consts::PI {
        x += std::f64::consts::TAU;
    }
    x
}

/// Runs CA sweeps until a full sweep's total gain drops below the
/// improvement tolerance or the sweep budget runs out.
pub fn ca_run(cfg: &CaConfig, spec: &ObjectiveSpec) -> Result<(UnitaryMatrix, LearnTrace)> {
    cfg.validate()?;
    if cfg.init.dim() != spec.dim() {
        return Err(Error::InvalidArguments(format!(
            "init dimension {} does not match objective dimension {}",
            cfg.init.dim(),
            spec.dim()
        )));
    }
    let backend = spec.resolve()?;
    let n = cfg.init.dim();
    let mut a = cfg.init.clone();
    let mut x = match &backend {
        Backend::Samples { set, .. } => Some(a.matrix().mul(set.matrix())),
        Backend::Analytic { .. } => None,
    };

    let mut objective = vec![backend.value(&a)];
    let mut step_norm = Vec::new();
    let mut terminated_by = TerminationReason::MaxIters;

    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for k in 0..n {
        for i in k + 1..n {
            pairs.push((i, k));
        }
    }

    for sweep in 0..cfg.max_sweeps {
        if let SweepOrder::SeededRandom(seed) = cfg.sweep_order {
            let mut r = rng::substream(seed, sweep as u64);
            rand::seq::SliceRandom::shuffle(&mut pairs[..], &mut r);
        }
        let sweep_start = a.clone();
        let mut sweep_gain = 0.0;

        for &(i, k) in &pairs {
            let m = pair_moments(&a, &backend, x.as_ref(), i, k);
            let sol = solve_inner(&m, cfg.inner_tol);
            if sol.gain <= 0.0 {
                continue;
            }
            let g = GivensRotation::new(i, k, sol.alpha)?;
            let bi = PhaseShift::new(i, sol.beta_i)?;
            let bk = PhaseShift::new(k, sol.beta_k)?;
            a = apply_update(&a, &g, &bi, &bk)?;
            if let Some(xm) = x.as_mut() {
                rotate_cache_rows(xm, i, k, sol.alpha, sol.beta_i);
            }
            sweep_gain += sol.gain;
        }

        // Refresh the cache from the transform itself so rounding drift
        // cannot accumulate across sweeps.
        if let (Some(xm), Backend::Samples { set, .. }) = (x.as_mut(), &backend) {
            *xm = a.matrix().mul(set.matrix());
        }
        objective.push(backend.value(&a));
        step_norm.push(a.matrix().frob_dist(sweep_start.matrix()));

        if sweep_gain <= cfg.improvement_tol {
            terminated_by = if sweep == 0 {
                TerminationReason::FixedPoint
            } else {
                TerminationReason::ObjTol
            };
            break;
        }
    }
    Ok((
        a,
        LearnTrace {
            objective,
            step_norm,
            terminated_by,
        },
    ))
}

/// Applies the G(i,k,α)·R(i,Δβ) update to the cached rows of X = A·Y.
fn rotate_cache_rows(x: &mut CMatrix, i: usize, k: usize, alpha: f64, dbeta: f64) {
    let (c, s) = (alpha.cos(), alpha.sin());
    let ph = Complex64::from_polar(1.0, dbeta);
    for col in 0..x.cols() {
        let zi = x[(i, col)] * ph;
        let zk = x[(k, col)];
        x[(i, col)] = zi * c + zk * s;
        x[(k, col)] = -zi * s + zk * c;
    }
}

/// Fixed-point test for MSP: the gradient must factor as D·A or A·D with
/// D a real diagonal matrix, i.e. ∇·Aᴴ (or Aᴴ·∇) must be real diagonal.
///
/// Residuals collect the off-diagonal entries plus the imaginary parts of
/// the diagonal, in Frobenius norm, scaled by ‖∇‖_F so the verdict is
/// gain-independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointVerdict {
    pub is_fixed: bool,
    pub residual_left: f64,
    pub residual_right: f64,
    pub tol: f64,
}

/// Default fixed-point residual tolerance.
pub const FIXED_POINT_TOL: f64 = 1e-8;

pub fn check_msp_fixed_point(a: &UnitaryMatrix, grad: &CMatrix, tol: f64) -> FixedPointVerdict {
    let norm = grad.frob_norm();
    let (residual_left, residual_right) = if norm == 0.0 {
        (0.0, 0.0)
    } else {
        let left = grad.mul(&a.matrix().hermitian());
        let right = a.matrix().hermitian().mul(grad);
        (
            real_diagonal_residual(&left) / norm,
            real_diagonal_residual(&right) / norm,
        )
    };
    FixedPointVerdict {
        is_fixed: residual_left.min(residual_right) <= tol,
        residual_left,
        residual_right,
        tol,
    }
}

fn real_diagonal_residual(m: &CMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let z = m[(i, k)];
            if i == k {
                acc += z.im * z.im;
            } else {
                acc += z.norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Local-optimality test for CA: every pair must satisfy the first-order
/// condition |first| ≤ tol and the strict second-order condition
/// second < −tol. Degenerate problems (all derivatives zero) fail the
/// strict condition and yield a false verdict.
pub fn check_ca_local_opt(
    a: &UnitaryMatrix,
    spec: &ObjectiveSpec,
    tol: f64,
) -> Result<(bool, DerivativeReport)> {
    if a.dim() != spec.dim() {
        return Err(Error::InvalidArguments(
            "transform and objective dimensions differ".into(),
        ));
    }
    let backend = spec.resolve()?;
    let report = ca_derivatives_backend(a, &backend);
    let verdict = report.max_abs_first <= tol && report.max_second < -tol;
    Ok((verdict, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{dct2_matrix, dft_matrix, l4_norm4, nearest_cp, random_cp, random_unitary};
    use crate::models::{sample_multipath, MultipathModel, SampleSet, SinusoidModel};
    use crate::objective::{g_det, ObjectiveSpec, StochasticModel};
    use num_complex::Complex;

    fn pure_spec(n: usize) -> ObjectiveSpec {
        ObjectiveSpec::Dataset(SampleSet::new(CMatrix::identity(n)))
    }

    fn unit_multipath(b: usize, seed: u64) -> MultipathModel {
        MultipathModel::new(b, vec![Complex::ONE], seed).unwrap()
    }

    #[test]
    fn cp_matrices_are_fixed_by_the_pure_step() {
        let c = random_cp(5, 8).unwrap();
        let next = msp_pure_step(&c).unwrap();
        assert!(next.matrix().frob_dist(c.matrix()) < 1e-10);
    }

    #[test]
    fn positive_diagonal_times_a_projects_back_to_a() {
        let a = random_unitary(4, 3).unwrap();
        let mut d = CMatrix::identity(4);
        for (i, v) in [1.5, 0.2, 3.0, 0.9].into_iter().enumerate() {
            d[(i, i)] = Complex::new(v, 0.0);
        }
        let step = msp_step(&a, &d.mul(a.matrix())).unwrap();
        assert!(step.matrix().frob_dist(a.matrix()) < 1e-9);
    }

    #[test]
    fn identity_and_dft_are_fixed_points_of_the_pure_step() {
        let i4 = UnitaryMatrix::new(CMatrix::identity(4)).unwrap();
        assert!(msp_pure_step(&i4).unwrap().matrix().frob_dist(i4.matrix()) < 1e-12);
        let f = dft_matrix(8).unwrap();
        assert!(msp_pure_step(&f).unwrap().matrix().frob_dist(f.matrix()) < 1e-10);
    }

    #[test]
    fn msp_step_improves_the_dataset_objective() {
        for seed in 0..20 {
            let n = 5;
            let a = random_unitary(n, seed).unwrap();
            let y = sample_multipath(&unit_multipath(n, 100 + seed), 6).unwrap();
            let grad = crate::objective::grad_gdet(&a, &y).unwrap();
            let next = msp_step(&a, &grad).unwrap();
            let before = g_det(&a, &y).unwrap();
            let after = g_det(&next, &y).unwrap();
            assert!(after >= before - 1e-12, "seed {seed}: {before} -> {after}");
        }
    }

    #[test]
    fn msp_run_flags_fixed_point_at_the_first_iteration() {
        let f = dft_matrix(8).unwrap();
        let spec = ObjectiveSpec::AnalyticL1 {
            dim: 8,
            gain_mag: 1.0,
        };
        let (out, trace) = msp_run(&MspConfig::new(f.clone()), &spec).unwrap();
        assert_eq!(trace.terminated_by, TerminationReason::FixedPoint);
        assert_eq!(trace.iterations(), 1);
        assert!(trace.step_norm[0] <= 1e-10);
        assert!(out.matrix().frob_dist(f.matrix()) < 1e-9);
    }

    #[test]
    fn msp_run_objective_is_monotone_on_datasets() {
        for seed in 0..10 {
            let n = 6;
            let cfg = MspConfig::new(random_unitary(n, seed).unwrap());
            let y = sample_multipath(&unit_multipath(n, 200 + seed), 8).unwrap();
            let (_, trace) = msp_run(&cfg, &ObjectiveSpec::Dataset(y)).unwrap();
            for w in trace.objective.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "seed {seed}: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn perturbed_cp_contracts_to_cp_within_six_pure_steps() {
        // Start at squared distance 0.3 from a complex permutation,
        // inside the contraction region.
        let n = 6;
        for seed in 0..5 {
            let mut a = perturb_cp_to_distance(n, 0.3, seed);
            let mut dist = nearest_cp(&a).distance_sq;
            assert!((dist - 0.3).abs() < 1e-6);
            let mut iters = 0;
            while dist > 1e-9 {
                let next = msp_pure_step(&a).unwrap();
                let next_dist = nearest_cp(&next).distance_sq;
                assert!(next_dist < dist, "distance must strictly decrease");
                a = next;
                dist = next_dist;
                iters += 1;
                assert!(iters <= 6, "seed {seed}: too many iterations");
            }
        }
    }

    /// Builds a unitary matrix whose nearest-CP squared distance equals
    /// `target` (bisection along a projected perturbation path).
    pub(crate) fn perturb_cp_to_distance(n: usize, target: f64, seed: u64) -> UnitaryMatrix {
        let c = random_cp(n, seed).unwrap();
        let mut r = rng::substream(seed, 7);
        let e = CMatrix::from_fn(n, n, |_, _| rng::complex_gaussian(&mut r));
        let dist_at = |s: f64| -> (f64, UnitaryMatrix) {
            let blended = CMatrix::from_fn(n, n, |i, k| c.matrix()[(i, k)] + e[(i, k)] * s);
            let u = project_unitary(&blended).expect("perturbation keeps full rank");
            (nearest_cp(&u).distance_sq, u)
        };
        let mut hi = 0.1;
        while dist_at(hi).0 < target {
            hi *= 2.0;
            assert!(hi < 1e3, "failed to bracket the target distance");
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if dist_at(mid).0 < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        dist_at(0.5 * (lo + hi)).1
    }

    #[test]
    fn random_inits_converge_to_permutations_under_the_pure_objective() {
        for seed in 0..100 {
            let n = 4 + (seed as usize % 5);
            let cfg = MspConfig::new(random_unitary(n, 300 + seed).unwrap());
            let (out, trace) = msp_run(&cfg, &pure_spec(n)).unwrap();
            let proj = nearest_cp(&out);
            assert!(
                proj.distance_sq <= 1e-9,
                "seed {seed}: distance² {}",
                proj.distance_sq
            );
            assert!(proj.is_permutation);
            assert!((l4_norm4(out.matrix()) - n as f64).abs() < 1e-6);
            assert!(trace.terminated_by != TerminationReason::MaxIters);
        }
    }

    #[test]
    fn ca_inner_finds_nothing_at_a_local_maximum() {
        let f = dft_matrix(6).unwrap();
        let spec = ObjectiveSpec::AnalyticL1 {
            dim: 6,
            gain_mag: 1.0,
        };
        for (i, k) in [(1, 0), (3, 2), (5, 0)] {
            let sol = ca_inner(&f, i, k, &spec, 1e-10).unwrap();
            assert!(sol.gain <= 1e-10, "pair ({i},{k}): gain {}", sol.gain);
        }
    }

    #[test]
    fn ca_inner_on_one_sparse_data_has_zero_gain() {
        let a = UnitaryMatrix::new(CMatrix::identity(2)).unwrap();
        let mut col = vec![Complex::ZERO; 2];
        col[0] = Complex::ONE;
        let spec = ObjectiveSpec::Dataset(SampleSet::from_columns(&[col]).unwrap());
        let sol = ca_inner(&a, 1, 0, &spec, 1e-10).unwrap();
        assert_eq!(sol.gain, 0.0);
        assert_eq!(sol.alpha, 0.0);
    }

    #[test]
    fn ca_inner_beats_a_dense_grid_oracle() {
        // The solver must never miss the basin a 720×720 exhaustive grid
        // finds (it may refine beyond it).
        for seed in 0..4 {
            let n = 4;
            let a = random_unitary(n, 400 + seed).unwrap();
            let y = sample_multipath(&unit_multipath(n, 500 + seed), 5).unwrap();
            let spec = ObjectiveSpec::Dataset(y.clone());
            let sol = ca_inner(&a, 2, 1, &spec, 1e-10).unwrap();

            let x = a.matrix().mul(y.matrix());
            let m = PairMoments::from_rows(x.row(2), x.row(1), false);
            let origin = m.pair_objective(0.0, 0.0);
            let mut oracle_gain: f64 = 0.0;
            for ja in 0..720 {
                let alpha = -std::f64::consts::FRAC_PI_2
                    + (ja + 1) as f64 * std::f64::consts::PI / 720.0;
                for jd in 0..720 {
                    let dbeta =
                        -std::f64::consts::PI + (jd + 1) as f64 * std::f64::consts::TAU / 720.0;
                    oracle_gain = oracle_gain.max(m.pair_objective(alpha, dbeta) - origin);
                }
            }
            assert!(
                sol.gain >= oracle_gain - 1e-6,
                "seed {seed}: solver {} vs oracle {oracle_gain}",
                sol.gain
            );
        }
    }

    #[test]
    fn ca_run_sees_dft_as_fixed_under_the_analytic_objective() {
        let f = dft_matrix(8).unwrap();
        let spec = ObjectiveSpec::AnalyticL1 {
            dim: 8,
            gain_mag: 1.0,
        };
        let mut cfg = CaConfig::new(f.clone());
        cfg.improvement_tol = 1e-8;
        let (out, trace) = ca_run(&cfg, &spec).unwrap();
        assert_eq!(trace.terminated_by, TerminationReason::FixedPoint);
        assert!(out.matrix().frob_dist(f.matrix()) < 1e-6);
    }

    #[test]
    fn ca_run_improves_on_the_dct_for_sinusoids() {
        let b = 8;
        let dct = dct2_matrix(b).unwrap();
        let spec = ObjectiveSpec::MonteCarlo {
            model: StochasticModel::Sinusoid(SinusoidModel::new(b, 31).unwrap()),
            samples: 20_000,
            seed: 77,
        };
        let mut cfg = CaConfig::new(dct);
        cfg.max_sweeps = 3;
        let (_, trace) = ca_run(&cfg, &spec).unwrap();
        let gain = trace.objective.last().unwrap() - trace.objective[0];
        assert!(gain > 1e-4, "gain {gain}");
        for w in trace.objective.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn ca_run_random_order_matches_monotonicity() {
        let n = 5;
        let y = sample_multipath(&unit_multipath(n, 600), 7).unwrap();
        let mut cfg = CaConfig::new(random_unitary(n, 601).unwrap());
        cfg.sweep_order = SweepOrder::SeededRandom(5);
        cfg.max_sweeps = 4;
        let (_, trace) = ca_run(&cfg, &ObjectiveSpec::Dataset(y)).unwrap();
        for w in trace.objective.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn fixed_point_verdicts() {
        // ∇ = 2I at the identity factors as D·A exactly.
        let i4 = UnitaryMatrix::new(CMatrix::identity(4)).unwrap();
        let grad = CMatrix::identity(4).scale(Complex::new(2.0, 0.0));
        let v = check_msp_fixed_point(&i4, &grad, FIXED_POINT_TOL);
        assert!(v.is_fixed);
        assert!(v.residual_left < 1e-14 && v.residual_right < 1e-14);

        // Random gradients at random unitaries never factor that way.
        for seed in 0..20 {
            let a = random_unitary(4, 700 + seed).unwrap();
            let mut r = rng::substream(800 + seed, 0);
            let g = CMatrix::from_fn(4, 4, |_, _| rng::complex_gaussian(&mut r));
            let v = check_msp_fixed_point(&a, &g, FIXED_POINT_TOL);
            assert!(!v.is_fixed);
            assert!(v.residual_left.min(v.residual_right) > 1e-3);
        }
    }

    #[test]
    fn fixed_point_residuals_are_phase_invariant() {
        let a = random_unitary(4, 900).unwrap();
        let y = sample_multipath(&unit_multipath(4, 901), 6).unwrap();
        let grad = crate::objective::grad_gdet(&a, &y).unwrap();
        let base = check_msp_fixed_point(&a, &grad, FIXED_POINT_TOL);

        // Apply a diagonal phase R to both the transform and (covariantly)
        // the gradient.
        let mut ra = a.matrix().clone();
        let mut rg = grad.clone();
        for i in 0..4 {
            let ph = Complex64::from_polar(1.0, 0.3 + i as f64);
            for k in 0..4 {
                ra[(i, k)] *= ph;
                rg[(i, k)] *= ph;
            }
        }
        let v = check_msp_fixed_point(&UnitaryMatrix::new(ra).unwrap(), &rg, FIXED_POINT_TOL);
        assert!((v.residual_left - base.residual_left).abs() < 1e-9);
        assert!((v.residual_right - base.residual_right).abs() < 1e-9);
    }

    #[test]
    fn fixed_point_residuals_are_cp_covariant() {
        // Replacing a by P·a with the gradient transformed the same way
        // leaves both residuals unchanged (the objective itself is
        // CP-invariant, so its gradient transforms covariantly).
        let n = 5;
        let a = random_unitary(n, 902).unwrap();
        let y = sample_multipath(&unit_multipath(n, 903), 7).unwrap();
        let grad = crate::objective::grad_gdet(&a, &y).unwrap();
        let base = check_msp_fixed_point(&a, &grad, FIXED_POINT_TOL);

        let p = random_cp(n, 904).unwrap();
        let pa = UnitaryMatrix::new(p.matrix().mul(a.matrix())).unwrap();
        let pg = crate::objective::grad_gdet(&pa, &y).unwrap();
        let v = check_msp_fixed_point(&pa, &pg, FIXED_POINT_TOL);
        assert!((v.residual_left - base.residual_left).abs() < 1e-9);
        assert!((v.residual_right - base.residual_right).abs() < 1e-9);
    }

    #[test]
    fn dft_is_ca_locally_optimal_dct_is_not() {
        let b = 8;
        let f = dft_matrix(b).unwrap();
        let (ok, report) = check_ca_local_opt(
            &f,
            &ObjectiveSpec::AnalyticL1 {
                dim: b,
                gain_mag: 1.0,
            },
            1e-8,
        )
        .unwrap();
        assert!(ok, "first {} second {}", report.max_abs_first, report.max_second);

        let dct = dct2_matrix(b).unwrap();
        let spec = ObjectiveSpec::MonteCarlo {
            model: StochasticModel::Sinusoid(SinusoidModel::new(b, 5).unwrap()),
            samples: 50_000,
            seed: 6,
        };
        let (ok, report) = check_ca_local_opt(&dct, &spec, 1e-6).unwrap();
        assert!(!ok);
        assert!(report.max_abs_first > 1e-6);
    }

    #[test]
    fn degenerate_all_zero_data_fails_the_strict_verdict() {
        let n = 3;
        let a = UnitaryMatrix::new(CMatrix::identity(n)).unwrap();
        let zero = SampleSet::new(CMatrix::zeros(n, 2));
        let (ok, report) = check_ca_local_opt(&a, &ObjectiveSpec::Dataset(zero), 1e-8).unwrap();
        assert!(!ok);
        assert_eq!(report.max_second, 0.0);
    }

    #[test]
    fn trace_serializes_with_termination_reason() {
        let trace = LearnTrace {
            objective: vec![1.0, 2.0],
            step_norm: vec![0.5],
            terminated_by: TerminationReason::StepTol,
        };
        let json = trace.to_json();
        assert!(json.contains("\"terminated_by\": \"step_tol\""));
        assert!(json.contains("\"iteration\": 1"));
    }
}
