//! Multi-user uplink Monte-Carlo: transmit, AWGN, detection, BER sweeps.
//!
//! The receive model is y = H·s + n with i.i.d. circularly-symmetric
//! Gaussian noise. Two detectors are provided: antenna-domain LMMSE and
//! a reduced-complexity beamspace variant that transforms the system by
//! a unitary matrix, keeps only the rows with the largest channel
//! energy, and runs LMMSE on the reduced system. Because the transform
//! is unitary, noise statistics are unchanged and full-size beamspace
//! detection is algebraically identical to antenna-domain detection.
//!
//! Conventions (asserted by tests): constellations have unit average
//! energy, Gray bit mapping, ties in the hard decision break toward the
//! lower constellation index; SNR is defined per receive antenna as
//! E[‖H·s‖²]/(B·n0) = ‖H‖_F²/(B·n0), so each noise entry has total
//! variance n0.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkit::{CMatrix, UnitaryMatrix};
use crate::rng;
use crate::Complex64;

/// Supported symbol constellations (unit average energy, Gray-coded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Constellation {
    Qpsk,
    Qam16,
}

impl Constellation {
    pub fn bits_per_symbol(&self) -> usize {
        match self {
            Constellation::Qpsk => 2,
            Constellation::Qam16 => 4,
        }
    }

    /// Constellation points indexed by their bit pattern (MSB first).
    pub fn points(&self) -> &'static [Complex64] {
        match self {
            Constellation::Qpsk => &QPSK_POINTS,
            Constellation::Qam16 => &QAM16_POINTS,
        }
    }

    /// Maps `bits_per_symbol` bits to a point.
    pub fn map_bits(&self, bits: &[bool]) -> Complex64 {
        debug_assert_eq!(bits.len(), self.bits_per_symbol());
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        self.points()[idx]
    }

    /// Nearest-point hard decision; exact distance ties break toward the
    /// lower index.
    pub fn hard_decision(&self, z: Complex64) -> (usize, Complex64) {
        let points = self.points();
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (idx, &p) in points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = idx;
            }
        }
        (best, points[best])
    }

    /// Bits (MSB first) of a point index.
    pub fn bits_of(&self, idx: usize) -> Vec<bool> {
        let n = self.bits_per_symbol();
        (0..n).map(|b| (idx >> (n - 1 - b)) & 1 == 1).collect()
    }
}

const FRAC_1_SQRT_10: f64 = 0.31622776601683794;

/// Gray map per axis for 16-QAM: bit pair 00→−3, 01→−1, 11→+1, 10→+3.
const fn gray_level(b0: bool, b1: bool) -> f64 {
    match (b0, b1) {
        (false, false) => -3.0,
        (false, true) => -1.0,
        (true, true) => 1.0,
        (true, false) => 3.0,
    }
}

static QPSK_POINTS: [Complex64; 4] = {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // Index = (b0 << 1) | b1; bit 0 selects the real sign, bit 1 the
    // imaginary sign; 0 → +, 1 → −.
    [
        Complex::new(s, s),
        Complex::new(s, -s),
        Complex::new(-s, s),
        Complex::new(-s, -s),
    ]
};

static QAM16_POINTS: [Complex64; 16] = {
    let mut pts = [Complex::new(0.0, 0.0); 16];
    let mut idx = 0;
    while idx < 16 {
        let b0 = (idx >> 3) & 1 == 1;
        let b1 = (idx >> 2) & 1 == 1;
        let b2 = (idx >> 1) & 1 == 1;
        let b3 = idx & 1 == 1;
        pts[idx] = Complex::new(
            gray_level(b0, b1) * FRAC_1_SQRT_10,
            gray_level(b2, b3) * FRAC_1_SQRT_10,
        );
        idx += 1;
    }
    pts
};

/// Receive vector y = H·s + n with per-entry complex noise variance `n0`
/// (a zero `n0` is the noiseless test hook; the generator is still
/// advanced identically).
pub fn uplink_rx(
    h: &CMatrix,
    s: &[Complex64],
    n0: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Complex64>> {
    if h.cols() != s.len() {
        return Err(Error::InvalidArguments(format!(
            "channel has {} users but {} symbols supplied",
            h.cols(),
            s.len()
        )));
    }
    if !(n0 >= 0.0) || !n0.is_finite() {
        return Err(Error::InvalidArguments("noise variance must be finite and ≥ 0".into()));
    }
    let scale = n0.sqrt();
    Ok(h.matvec(s)
        .into_iter()
        .map(|y| y + rng::complex_gaussian(rng) * scale)
        .collect())
}

/// Hard-decided symbols and their bits, per user.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub symbols: Vec<Complex64>,
    pub bits: Vec<bool>,
}

/// LMMSE detection: ŝ = (HᴴH + n0·I)⁻¹·Hᴴ·y followed by per-entry hard
/// decisions.
///
/// Fails when the regularized normal matrix is singular (zero noise and
/// rank-deficient H).
pub fn lmmse_detect(
    y: &[Complex64],
    h: &CMatrix,
    n0: f64,
    constellation: Constellation,
) -> Result<Detection> {
    let b = h.rows();
    let u = h.cols();
    if y.len() != b {
        return Err(Error::InvalidArguments(format!(
            "receive vector length {} does not match {} antennas",
            y.len(),
            b
        )));
    }
    if u > b {
        return Err(Error::InvalidArguments(format!(
            "more users ({u}) than observations ({b})"
        )));
    }
    // Normal equations G·ŝ = Hᴴy.
    let mut g = vec![Complex64::ZERO; u * u];
    for p in 0..u {
        for q in 0..u {
            let mut acc = Complex64::ZERO;
            for t in 0..b {
                acc += h[(t, p)].conj() * h[(t, q)];
            }
            if p == q {
                acc += Complex::new(n0, 0.0);
            }
            g[p * u + q] = acc;
        }
    }
    let mut rhs: Vec<Complex64> = (0..u)
        .map(|p| (0..b).map(|t| h[(t, p)].conj() * y[t]).sum())
        .collect();
    solve_in_place(&mut g, &mut rhs, u)?;

    let mut symbols = Vec::with_capacity(u);
    let mut bits = Vec::with_capacity(u * constellation.bits_per_symbol());
    for est in rhs {
        let (idx, point) = constellation.hard_decision(est);
        symbols.push(point);
        bits.extend(constellation.bits_of(idx));
    }
    Ok(Detection { symbols, bits })
}

/// Gaussian elimination with partial pivoting on a dense u×u system.
fn solve_in_place(a: &mut [Complex64], rhs: &mut [Complex64], n: usize) -> Result<()> {
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = a[col * n + col].norm();
        for row in col + 1..n {
            let mag = a[row * n + col].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag < 1e-300 {
            return Err(Error::Detection(
                "singular normal matrix (zero noise with rank-deficient channel?)".into(),
            ));
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == Complex64::ZERO {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
            let r = rhs[col];
            rhs[row] -= factor * r;
        }
    }
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * rhs[k];
        }
        rhs[row] = acc / a[row * n + row];
    }
    Ok(())
}

/// Largest-entry beamspace detection: transform y and H by the unitary
/// `transform`, keep the ⌈density·B⌉ rows with the largest channel row
/// energy Σ_u |(AH)_{b,u}|² (ties toward lower row index, kept rows in
/// ascending order), and run LMMSE on the reduced system.
///
/// With density 1 this reproduces full LMMSE on the transformed system
/// bit for bit.
pub fn le_detect(
    y: &[Complex64],
    h: &CMatrix,
    n0: f64,
    density: f64,
    transform: &UnitaryMatrix,
    constellation: Constellation,
) -> Result<Detection> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArguments(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    let b = h.rows();
    if transform.dim() != b || y.len() != b {
        return Err(Error::InvalidArguments(
            "transform, channel, and receive dimensions must agree".into(),
        ));
    }
    let yb = transform.matrix().matvec(y);
    let hb = transform.matrix().mul(h);
    let keep = ((density * b as f64).ceil() as usize).clamp(1, b);

    let mut order: Vec<usize> = (0..b).collect();
    let energy: Vec<f64> = (0..b)
        .map(|row| hb.row(row).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    order.sort_by(|&p, &q| energy[q].partial_cmp(&energy[p]).unwrap().then(p.cmp(&q)));
    let mut selected = order[..keep].to_vec();
    selected.sort_unstable();

    let y_red: Vec<Complex64> = selected.iter().map(|&r| yb[r]).collect();
    let h_red = CMatrix::from_fn(keep, h.cols(), |i, k| hb[(selected[i], k)]);
    lmmse_detect(&y_red, &h_red, n0, constellation)
}

/// Detector selection for BER sweeps.
#[derive(Debug, Clone)]
pub enum DetectorKind {
    /// Full LMMSE in the antenna domain.
    LmmseAntenna,
    /// Reduced beamspace detection at the given density (default 0.125).
    LeBeamspace {
        density: f64,
        transform: UnitaryMatrix,
    },
}

/// Uplink sweep configuration.
#[derive(Debug, Clone)]
pub struct UplinkConfig {
    pub b: usize,
    pub u: usize,
    pub constellation: Constellation,
    pub snr_db_grid: Vec<f64>,
    pub trials_per_point: usize,
    pub seed: u64,
}

impl UplinkConfig {
    fn validate(&self) -> Result<()> {
        if self.b == 0 || self.u == 0 {
            return Err(Error::InvalidDimension("counts must be positive".into()));
        }
        if self.u > self.b {
            return Err(Error::InvalidArguments(format!(
                "more users ({}) than antennas ({})",
                self.u, self.b
            )));
        }
        if self.trials_per_point == 0 {
            return Err(Error::InvalidArguments("need at least one trial".into()));
        }
        if self.snr_db_grid.is_empty() {
            return Err(Error::InvalidArguments("empty SNR grid".into()));
        }
        Ok(())
    }
}

/// Uncoded BER per SNR point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerCurve {
    pub snr_db: Vec<f64>,
    pub ber: Vec<f64>,
    pub bit_count: Vec<u64>,
}

impl BerCurve {
    /// CSV rows `snr_db,ber,bits` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("snr_db,ber,bits\n");
        for i in 0..self.snr_db.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.snr_db[i], self.ber[i], self.bit_count[i]
            ));
        }
        out
    }
}

/// Sweeps SNR points, cycling the channel list across trials. Trial t of
/// point p draws from RNG substream (p << 40) | t, so curves are
/// bit-identical across reruns and across worker counts; SNR points run
/// in parallel.
pub fn ber_sweep(
    cfg: &UplinkConfig,
    det: &DetectorKind,
    channels: &[CMatrix],
) -> Result<BerCurve> {
    cfg.validate()?;
    if channels.is_empty() {
        return Err(Error::InvalidArguments("need at least one channel".into()));
    }
    for h in channels {
        if h.rows() != cfg.b || h.cols() != cfg.u {
            return Err(Error::InvalidArguments(format!(
                "channel is {}x{}, expected {}x{}",
                h.rows(),
                h.cols(),
                cfg.b,
                cfg.u
            )));
        }
    }
    if let DetectorKind::LeBeamspace { density, transform } = det {
        if !(*density > 0.0 && *density <= 1.0) {
            return Err(Error::InvalidArguments(format!(
                "density must lie in (0, 1], got {density}"
            )));
        }
        if transform.dim() != cfg.b {
            return Err(Error::InvalidArguments(
                "transform dimension must match the antenna count".into(),
            ));
        }
    }

    // Per-channel noise scale: n0 = ‖H‖_F² / (B · snr).
    let frob_sq: Vec<f64> = channels.iter().map(|h| h.frob_norm().powi(2)).collect();
    let bps = cfg.constellation.bits_per_symbol();

    let results: Result<Vec<(f64, u64)>> = (0..cfg.snr_db_grid.len())
        .into_par_iter()
        .map(|p| -> Result<(f64, u64)> {
            let snr = 10f64.powf(cfg.snr_db_grid[p] / 10.0);
            let mut errors: u64 = 0;
            let mut total: u64 = 0;
            let mut tx_bits = vec![false; cfg.u * bps];
            let mut symbols = vec![Complex64::ZERO; cfg.u];
            for t in 0..cfg.trials_per_point {
                let ch = t % channels.len();
                let h = &channels[ch];
                let n0 = frob_sq[ch] / (cfg.b as f64 * snr);
                let mut r = rng::substream(cfg.seed, ((p as u64) << 40) | t as u64);
                for bit in tx_bits.iter_mut() {
                    *bit = r.random();
                }
                for (user, sym) in symbols.iter_mut().enumerate() {
                    *sym = cfg
                        .constellation
                        .map_bits(&tx_bits[user * bps..(user + 1) * bps]);
                }
                let y = uplink_rx(h, &symbols, n0, &mut r)?;
                let detection = match det {
                    DetectorKind::LmmseAntenna => {
                        lmmse_detect(&y, h, n0, cfg.constellation)?
                    }
                    DetectorKind::LeBeamspace { density, transform } => {
                        le_detect(&y, h, n0, *density, transform, cfg.constellation)?
                    }
                };
                errors += detection
                    .bits
                    .iter()
                    .zip(&tx_bits)
                    .filter(|(a, b)| a != b)
                    .count() as u64;
                total += (cfg.u * bps) as u64;
            }
            Ok((errors as f64 / total as f64, total))
        })
        .collect();
    let results = results?;
    Ok(BerCurve {
        snr_db: cfg.snr_db_grid.clone(),
        ber: results.iter().map(|r| r.0).collect(),
        bit_count: results.iter().map(|r| r.1).collect(),
    })
}
