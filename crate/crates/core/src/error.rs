//! Error type shared by all modules.

/// Errors surfaced by construction, decomposition, sampling, and detection.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A dimension argument is zero or otherwise unusable.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// Input data violates a precondition (non-finite entries, bad range).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Mismatched or inconsistent arguments (dimensions, indices).
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),

    /// Unitary projection is not well defined: the input is (numerically)
    /// rank deficient, so the polar factor is not unique.
    #[error("degenerate projection: sigma_min {sigma_min:.3e} below threshold {threshold:.3e}")]
    DegenerateProjection { sigma_min: f64, threshold: f64 },

    /// A file does not conform to the expected on-disk format.
    #[error("format error: {0}")]
    Format(String),

    /// Scene synthesis could not satisfy the angular constraints.
    #[error("infeasible scene: rejection sampling exceeded {draws} draws")]
    InfeasibleScene { draws: u64 },

    /// A train/test split fraction would leave one side empty.
    #[error("invalid fraction: {0}")]
    InvalidFraction(String),

    /// Detection failed (e.g. singular normal equations at zero noise).
    #[error("detection error: {0}")]
    Detection(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
