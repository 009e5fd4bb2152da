//! Dense complex matrix used for `S`, `Z`, `X`, `Y` and the noise.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
///
/// The detectors only ever touch the data through entrywise sums
/// (`tr(A Bᴴ) = Σ a_ij conj(b_ij)`), so storage order is irrelevant to the
/// statistics; `entries()` is the vectorized view `vec(A)` up to a fixed
/// permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Number of entries, `N = rows·cols`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.data
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// `tr(A Aᴴ) = ‖A‖_F²`.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `tr(self · otherᴴ)`.
    pub fn trace_inner(&self, other: &ComplexMatrix) -> Result<Complex64> {
        self.check_same_dims(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    /// Ordinary matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn check_same_dims(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::invalid(format!(
                "dimension mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn trace_inner_conjugates_rhs() {
        let a = ComplexMatrix::new(1, 2, vec![c(1.0, 1.0), c(0.0, 2.0)]).unwrap();
        let b = ComplexMatrix::new(1, 2, vec![c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        // (1+i)(-i) + (2i)(1) = 1 - i + 2i
        assert_eq!(a.trace_inner(&b).unwrap(), c(1.0, 1.0));
        assert_eq!(a.energy(), 6.0);
    }

    #[test]
    fn matmul_small() {
        let a = ComplexMatrix::new(2, 1, vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let b = ComplexMatrix::new(1, 2, vec![c(2.0, 0.0), c(0.0, -1.0)]).unwrap();
        let p = a.matmul(&b).unwrap();
        assert_eq!(p.dims(), (2, 2));
        assert_eq!(p.get(0, 0), c(2.0, 0.0));
        assert_eq!(p.get(0, 1), c(0.0, -1.0));
        assert_eq!(p.get(1, 0), c(0.0, 2.0));
        assert_eq!(p.get(1, 1), c(1.0, 0.0));
        assert!(b.matmul(&b).is_err());
    }
}
