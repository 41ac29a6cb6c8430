use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::Complex64;

/// Dense complex matrix, row-major, 64-bit float components.
///
/// Dimensions are at least 1×1 and all entries are finite; both are
/// checked at construction.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimension(format!(
                "matrix dimensions must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidArguments(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// All-zeros matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "dimensions must be at least 1x1");
        Self {
            rows,
            cols,
            data: vec![Complex::ZERO; rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::ONE;
        }
        m
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for k in 0..cols {
                m[(i, k)] = f(i, k);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Row `i` as a contiguous slice.
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `k` as an owned vector.
    pub fn col(&self, k: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, k)]).collect()
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, k| self[(k, i)].conj())
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "inner dimensions must agree: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let lrow = self.row(i);
            let orow = out.row_mut(i);
            for (p, &l) in lrow.iter().enumerate() {
                if l == Complex::ZERO {
                    continue;
                }
                let rrow = rhs.row(p);
                for (k, &r) in rrow.iter().enumerate() {
                    orow[k] += l * r;
                }
            }
        }
        out
    }

    /// Matrix-vector product `self * v`.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length must match columns");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    /// Entrywise difference `self - rhs`.
    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Entrywise map.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to `rhs`.
    pub fn frob_dist(&self, rhs: &Self) -> f64 {
        self.sub(rhs).frob_norm()
    }

    /// Frobenius norm of `selfᴴ·self − I`; zero for unitary matrices.
    pub fn unitarity_defect(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut acc = 0.0;
        for p in 0..n {
            for q in p..n {
                let mut dot: Complex64 = Complex::ZERO;
                for i in 0..n {
                    dot += self[(i, p)].conj() * self[(i, q)];
                }
                if p == q {
                    acc += (dot - Complex::ONE).norm_sqr();
                } else {
                    acc += 2.0 * dot.norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, k): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + k]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, k): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + k]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for k in 0..self.cols.min(8) {
                let z = self[(i, k)];
                write!(f, "{:+.4}{:+.4}j ", z.re, z.im)?;
            }
            writeln!(f, "{}", if self.cols > 8 { "..." } else { "" })?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_dimensions() {
        assert!(CMatrix::new(0, 3, vec![]).is_err());
        assert!(CMatrix::new(3, 0, vec![]).is_err());
    }

    #[test]
    fn rejects_non_finite_entries() {
        let bad = vec![Complex::new(f64::NAN, 0.0)];
        assert!(matches!(
            CMatrix::new(1, 1, bad),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn rejects_wrong_entry_count() {
        assert!(CMatrix::new(2, 2, vec![Complex::ONE; 3]).is_err());
    }

    #[test]
    fn hermitian_conjugates_and_transposes() {
        let m = CMatrix::new(
            1,
            2,
            vec![Complex::new(1.0, 2.0), Complex::new(3.0, -4.0)],
        )
        .unwrap();
        let h = m.hermitian();
        assert_eq!(h.rows(), 2);
        assert_eq!(h[(0, 0)], Complex::new(1.0, -2.0));
        assert_eq!(h[(1, 0)], Complex::new(3.0, 4.0));
    }

    #[test]
    fn identity_is_multiplicative_unit() {
        let m = CMatrix::from_fn(3, 3, |i, k| Complex::new(i as f64, k as f64));
        let i3 = CMatrix::identity(3);
        assert_eq!(m.mul(&i3), m);
        assert_eq!(i3.mul(&m), m);
    }

    #[test]
    fn unitarity_defect_of_identity_is_zero() {
        assert!(CMatrix::identity(5).unitarity_defect() < 1e-15);
    }
}
