//! Generative signal models and dataset handling.
//!
//! Two stochastic column models feed the l4 objectives: a multipath
//! superposition of complex exponentials with uniform angular frequencies,
//! and a real-valued sinusoid with uniform frequency and phase. A small
//! synthetic multi-user scene generator produces channel matrices for the
//! uplink simulator. Sampling is deterministic per (model, seed): sample m
//! always draws from RNG substream m, so regeneration is bit-identical
//! regardless of evaluation order.

use std::path::Path;

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matkit::{read_cmatrix, write_cmatrix, CMatrix};
use crate::rng;
use crate::Complex64;

/// Finite collection of complex column vectors, stored as the dim×count
/// matrix whose m-th column is the m-th sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    data: CMatrix,
}

impl SampleSet {
    /// Wraps a dim×count matrix of column samples.
    pub fn new(data: CMatrix) -> Self {
        Self { data }
    }

    /// Builds a set from explicit columns (all of equal length ≥ 1).
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidDimension(
                "sample set needs at least one column".into(),
            ));
        }
        let dim = columns[0].len();
        if dim == 0 || columns.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidArguments(
                "columns must share a positive length".into(),
            ));
        }
        let m = CMatrix::from_fn(dim, columns.len(), |i, k| columns[k][i]);
        Ok(Self { data: m })
    }

    /// Dimension N of each column.
    pub fn dim(&self) -> usize {
        self.data.rows()
    }

    /// Number of columns M.
    pub fn len(&self) -> usize {
        self.data.cols()
    }

    pub fn is_empty(&self) -> bool {
        false // M ≥ 1 by construction
    }

    /// The underlying dim×count matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn column(&self, m: usize) -> Vec<Complex64> {
        self.data.col(m)
    }

    /// Writes the set in the binary "cmx1" format.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_cmatrix(&self.data, path)
    }

    /// Reads a set saved with [`SampleSet::save`]; round-trips bit-exactly.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let data = read_cmatrix(path)?;
        Ok(Self { data })
    }

    /// Deterministic disjoint shuffle-split into (train, test).
    ///
    /// `train_frac` must leave both parts non-empty; columns are copied
    /// exactly, never re-normalized.
    pub fn split(&self, train_frac: f64, seed: u64) -> Result<(SampleSet, SampleSet)> {
        if !(train_frac > 0.0 && train_frac < 1.0) {
            return Err(Error::InvalidFraction(format!(
                "train fraction must lie strictly between 0 and 1, got {train_frac}"
            )));
        }
        let m = self.len();
        let n_train = (train_frac * m as f64).round() as usize;
        if n_train == 0 || n_train == m {
            return Err(Error::InvalidFraction(format!(
                "split of {m} columns at {train_frac} leaves an empty part"
            )));
        }
        let mut order: Vec<usize> = (0..m).collect();
        let mut r = rng::substream(seed, 0);
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut r);
        let pick =
            |idx: &[usize]| CMatrix::from_fn(self.dim(), idx.len(), |i, k| self.data[(i, idx[k])]);
        Ok((
            SampleSet::new(pick(&order[..n_train])),
            SampleSet::new(pick(&order[n_train..])),
        ))
    }
}

/// Multipath superposition: y_b = Σ_ℓ c_ℓ·e^{jΩ_ℓ·b} with the angular
/// frequencies Ω_ℓ drawn i.i.d. uniform over [0, 2π) per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathModel {
    /// Antenna count B.
    pub b: usize,
    /// Complex path gains c_ℓ (length = path count L).
    pub gains: Vec<Complex64>,
    /// Base seed for sampling.
    pub seed: u64,
}

impl MultipathModel {
    pub fn new(b: usize, gains: Vec<Complex64>, seed: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidDimension(
                "antenna count must be positive".into(),
            ));
        }
        if gains.is_empty() {
            return Err(Error::InvalidArguments(
                "need at least one path gain".into(),
            ));
        }
        if gains.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidArguments(
                "at least one gain must be non-zero".into(),
            ));
        }
        Ok(Self { b, gains, seed })
    }

    pub fn paths(&self) -> usize {
        self.gains.len()
    }

    /// The deterministic column for fixed angular frequencies; the test
    /// hook behind the stochastic sampler.
    pub fn column(&self, omegas: &[f64]) -> Vec<Complex64> {
        assert_eq!(omegas.len(), self.gains.len());
        (0..self.b)
            .map(|ant| {
                self.gains
                    .iter()
                    .zip(omegas)
                    .map(|(&c, &w)| c * Complex64::from_polar(1.0, w * ant as f64))
                    .sum()
            })
            .collect()
    }
}

/// Draws `n` multipath columns; sample m uses RNG substream m of the
/// model seed.
pub fn sample_multipath(model: &MultipathModel, n: usize) -> Result<SampleSet> {
    sample_multipath_seeded(model, n, model.seed)
}

/// As [`sample_multipath`] but with an explicit seed override.
pub fn sample_multipath_seeded(model: &MultipathModel, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "sample count must be positive".into(),
        ));
    }
    let mut omegas = vec![0.0; model.paths()];
    let columns: Vec<Vec<Complex64>> = (0..n)
        .map(|m| {
            let mut r = rng::substream(seed, m as u64);
            for w in omegas.iter_mut() {
                *w = rng::uniform_angle(&mut r);
            }
            model.column(&omegas)
        })
        .collect();
    SampleSet::from_columns(&columns)
}

/// Real sinusoid: y_b = cos(Ω·b + Φ) with Ω, Φ i.i.d. uniform over
/// [0, 2π) per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SinusoidModel {
    /// Vector length B.
    pub b: usize,
    /// Base seed for sampling.
    pub seed: u64,
}

impl SinusoidModel {
    pub fn new(b: usize, seed: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidDimension(
                "vector length must be positive".into(),
            ));
        }
        Ok(Self { b, seed })
    }

    /// Deterministic column for fixed (Ω, Φ); the test hook.
    pub fn column(&self, omega: f64, phi: f64) -> Vec<Complex64> {
        (0..self.b)
            .map(|ant| Complex::new((omega * ant as f64 + phi).cos(), 0.0))
            .collect()
    }
}

/// Draws `n` sinusoid columns; sample m uses RNG substream m.
pub fn sample_sinusoid(model: &SinusoidModel, n: usize) -> Result<SampleSet> {
    sample_sinusoid_seeded(model, n, model.seed)
}

/// As [`sample_sinusoid`] but with an explicit seed override.
pub fn sample_sinusoid_seeded(model: &SinusoidModel, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "sample count must be positive".into(),
        ));
    }
    let columns: Vec<Vec<Complex64>> = (0..n)
        .map(|m| {
            let mut r = rng::substream(seed, m as u64);
            let omega = rng::uniform_angle(&mut r);
            let phi = rng::uniform_angle(&mut r);
            model.column(omega, phi)
        })
        .collect();
    SampleSet::from_columns(&columns)
}

/// Synthetic multi-user line-of-sight scene for a half-wavelength uniform
/// linear array: per-user angles drawn uniformly over a sector with a
/// minimum angular separation, distance-dependent amplitudes, per-path
/// complex gains, and base-station power control capping the
/// received-energy spread between users.
#[derive(Debug, Clone, PartialEq)]
pub struct MuMimoScene {
    /// Base-station antennas B.
    pub b: usize,
    /// User count U.
    pub u: usize,
    /// Angular sector width in degrees (centered on broadside).
    pub sector_deg: f64,
    /// Distance range in meters.
    pub dmin: f64,
    pub dmax: f64,
    /// Minimum angular separation between users, degrees.
    pub min_sep_deg: f64,
    /// Maximum received-energy spread between users, dB.
    pub power_cap_db: f64,
    /// Propagation paths per user (first path is the direct one).
    pub paths_per_ue: usize,
    pub seed: u64,
}

impl MuMimoScene {
    /// Scene with the default geometry: 120° sector, 10–110 m, 5° minimum
    /// separation, 6 dB power cap.
    pub fn with_defaults(b: usize, u: usize, paths_per_ue: usize, seed: u64) -> Result<Self> {
        Self::new(b, u, 120.0, 10.0, 110.0, 5.0, 6.0, paths_per_ue, seed)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        b: usize,
        u: usize,
        sector_deg: f64,
        dmin: f64,
        dmax: f64,
        min_sep_deg: f64,
        power_cap_db: f64,
        paths_per_ue: usize,
        seed: u64,
    ) -> Result<Self> {
        if b == 0 || u == 0 || paths_per_ue == 0 {
            return Err(Error::InvalidDimension("counts must be positive".into()));
        }
        if min_sep_deg * u as f64 > sector_deg {
            return Err(Error::InvalidArguments(format!(
                "cannot place {u} users at {min_sep_deg}° separation inside a {sector_deg}° sector"
            )));
        }
        if dmin >= dmax || dmin <= 0.0 {
            return Err(Error::InvalidArguments(format!(
                "distance range [{dmin}, {dmax}] must be positive and increasing"
            )));
        }
        Ok(Self {
            b,
            u,
            sector_deg,
            dmin,
            dmax,
            min_sep_deg,
            power_cap_db,
            paths_per_ue,
            seed,
        })
    }
}

/// Array response of a half-wavelength uniform linear array at angle
/// `theta` (radians off broadside): p(ω)_b = e^{jωb} with ω = π·sin(θ).
pub fn array_response(b: usize, theta: f64) -> Vec<Complex64> {
    let omega = std::f64::consts::PI * theta.sin();
    (0..b)
        .map(|ant| Complex64::from_polar(1.0, omega * ant as f64))
        .collect()
}

const MAX_REJECTION_DRAWS: u64 = 1_000_000;

/// Draws `n_scenes` channel matrices (B×U, one column per user).
///
/// Angles use rejection sampling against the separation constraint and
/// fail after 10⁶ draws. The direct path points at the user; additional
/// paths take independent angles in the sector with the per-user gain
/// vector normalized. Power control then rescales columns so the
/// strongest user exceeds the weakest by at most the configured cap.
pub fn synth_scene_channels(scene: &MuMimoScene, n_scenes: usize) -> Result<Vec<CMatrix>> {
    if n_scenes == 0 {
        return Err(Error::InvalidDimension(
            "scene count must be positive".into(),
        ));
    }
    (0..n_scenes)
        .map(|s| synth_one_scene(scene, rng::substream(scene.seed, s as u64)))
        .collect()
}

fn synth_one_scene(scene: &MuMimoScene, mut r: rand_chacha::ChaCha8Rng) -> Result<CMatrix> {
    let half = scene.sector_deg / 2.0;
    let mut angles_deg: Vec<f64> = Vec::with_capacity(scene.u);
    let mut draws: u64 = 0;
    while angles_deg.len() < scene.u {
        let cand = r.random_range(-half..half);
        draws += 1;
        if draws > MAX_REJECTION_DRAWS {
            return Err(Error::InfeasibleScene { draws });
        }
        if angles_deg
            .iter()
            .all(|&a| (a - cand).abs() >= scene.min_sep_deg)
        {
            angles_deg.push(cand);
        }
    }

    let mut h = CMatrix::zeros(scene.b, scene.u);
    for u in 0..scene.u {
        let dist = r.random_range(scene.dmin..scene.dmax);
        let amp = scene.dmin / dist;
        // Unit-norm complex gain vector across paths.
        let mut gains: Vec<Complex64> = (0..scene.paths_per_ue)
            .map(|_| rng::complex_gaussian(&mut r))
            .collect();
        let norm = gains.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
        for g in gains.iter_mut() {
            *g /= norm;
        }
        for (path, &gain) in gains.iter().enumerate() {
            let theta_deg = if path == 0 {
                angles_deg[u]
            } else {
                r.random_range(-half..half)
            };
            let steer = array_response(scene.b, theta_deg.to_radians());
            for ant in 0..scene.b {
                h[(ant, u)] += gain * amp * steer[ant];
            }
        }
    }

    // Power control: cap every column at cap·(weakest energy).
    let energies: Vec<f64> = (0..scene.u)
        .map(|u| h.col(u).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    let e_min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let cap = 10f64.powf(scene.power_cap_db / 10.0);
    for u in 0..scene.u {
        if energies[u] > e_min * cap {
            let scale = (e_min * cap / energies[u]).sqrt();
            for ant in 0..scene.b {
                h[(ant, u)] *= scale;
            }
        }
    }
    Ok(h)
}
