//! Seedable, splittable randomness.
//!
//! Every stochastic operation in this crate draws from ChaCha8, a
//! counter-based generator with 2^64 independent streams per seed. A
//! (seed, stream) pair fully determines the draw sequence, so per-sample
//! and per-trial substreams can be generated in any order — or in
//! parallel — and still reproduce bit-identically.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::Complex64;

/// Generator for substream `stream` of the given seed.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform angle in [0, 2π).
pub fn uniform_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.0..std::f64::consts::TAU)
}

/// Circularly-symmetric complex Gaussian with unit variance
/// (real and imaginary parts each N(0, 1/2)).
pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
