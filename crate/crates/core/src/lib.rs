//! Learning unitary sparsifying transforms for beamspace processing.
//!
//! A unitary transform applied across a base-station antenna array turns
//! multipath channel vectors into (approximately) sparse beamspace vectors.
//! This crate measures that sparsity with the entrywise l4-norm, learns
//! transforms that maximize it over the unitary group, and provides the
//! numerical machinery to check when classical transforms (DFT, DCT) are
//! already optimal:
//!
//! - [`matkit`]: dense complex linear algebra — matrices, one-sided Jacobi
//!   SVD, unitary projection, Givens/phase updates, DFT/DCT builders, and
//!   the distance to the nearest complex permutation matrix.
//! - [`models`]: generative signal models (multipath exponentials, real
//!   sinusoids), synthetic multi-user channel scenes, dataset persistence.
//! - [`objective`]: l4 sparsity objectives (finite datasets, Monte-Carlo,
//!   exact single-path expectations), their gradients, and the scalar
//!   derivatives used by coordinate ascent.
//! - [`learn`]: the MSP (matching–stretching–projection) and CA (coordinate
//!   ascent over Givens rotations and phase shifts) learners, plus fixed-point
//!   and local-optimality verdicts.
//! - [`analysis`]: scripted verification of the DFT fixed-point and local
//!   optimality properties and of the DCT suboptimality scan.
//! - [`simulate`]: multi-user uplink Monte-Carlo with LMMSE and reduced
//!   beamspace largest-entry detection for BER comparisons.

pub mod analysis;
pub mod error;
pub mod learn;
pub mod matkit;
pub mod models;
pub mod objective;
pub mod rng;
pub mod simulate;

pub use error::{Error, Result};
pub use matkit::{CMatrix, CpProjection, GivensRotation, PhaseShift, UnitaryMatrix};
pub use models::{MultipathModel, MuMimoScene, SampleSet, SinusoidModel};
pub use objective::{DerivativeReport, ObjectiveSpec, StochasticModel};

/// Complex scalar used throughout: two 64-bit floats.
pub type Complex64 = num_complex::Complex<f64>;
