//! Dense complex linear algebra core.
//!
//! Everything here operates on small dense matrices (working range
//! N ≤ 256): a row-major complex matrix type, a one-sided Jacobi SVD,
//! projection onto the unitary group, Givens-rotation/phase-shift
//! updates, DFT/DCT constructors, the entrywise l4-norm, and the
//! distance to the nearest complex permutation (CP) matrix.
//!
//! All operations are pure functions on immutable inputs; values are
//! `Send + Sync` and never mutated after construction.

mod cmatrix;
mod cp;
mod io;
mod svd;
mod unitary;

pub use cmatrix::CMatrix;
pub use cp::{nearest_cp, CpProjection};
pub use io::{
    format_complex, parse_complex, read_cmatrix, read_cmatrix_csv, write_cmatrix,
    write_cmatrix_csv,
};
pub use svd::{jacobi_svd, project_unitary, Svd};
pub use unitary::{
    apply_update, dct2_matrix, dft_matrix, random_cp, random_unitary, GivensRotation, PhaseShift,
    UnitaryMatrix,
};

/// Entrywise l4-norm raised to the fourth power: Σ |a_ik|⁴.
///
/// For a unitary matrix the value lies in [1, N]; the maximum N is
/// attained exactly by complex permutation matrices and the minimum 1
/// by flat-modulus matrices such as the DFT.
pub fn l4_norm4(m: &CMatrix) -> f64 {
    m.entries().iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum()
}
