use std::ops::{Index, IndexMut};

use num_complex::Complex;
use serde::Serialize;

use super::{ComplexVector, Real};
use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexMatrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<R>>,
}

impl<R: Real> ComplexMatrix<R> {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<R>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix must have positive shape".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::new(R::zero(), R::zero()); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(R::one(), R::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<R>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[R]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, R::zero());
        }
        m
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &ComplexVector<R>, b: &ComplexVector<R>) -> Self {
        Self::from_fn(a.dim(), b.dim(), |i, j| a[i] * b[j].conj())
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

    pub fn as_slice(&self) -> &[Complex<R>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<R>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [Complex<R>] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn column(&self, j: usize) -> ComplexVector<R> {
        ComplexVector::from_vec_unchecked((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matvec(&self, v: &ComplexVector<R>) -> ComplexVector<R> {
        debug_assert_eq!(self.cols, v.dim());
        let x = v.as_slice();
        ComplexVector::from_vec_unchecked(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(x).fold(Complex::new(R::zero(), R::zero()), |acc, (a, b)| acc + a * b))
                .collect(),
        )
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.re == R::zero() && a.im == R::zero() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scaled(&self, s: Complex<R>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn max_abs(&self) -> R {
        self.data.iter().map(|z| z.norm()).fold(R::zero(), R::max)
    }

    pub fn frobenius_norm(&self) -> R {
        self.data.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
    }

    pub fn trace(&self) -> Complex<R> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::new(R::zero(), R::zero()), |a, b| a + b)
    }

    /// `max |M - M†|` entrywise.
    pub fn hermiticity_defect(&self) -> R {
        if !self.is_square() {
            return R::infinity();
        }
        let mut worst = R::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian within `rel_tol · max|M|`.
    pub fn is_hermitian(&self, rel_tol: R) -> bool {
        self.is_square() && self.hermiticity_defect() <= rel_tol * self.max_abs()
    }

    /// Errors unless the matrix is square and Hermitian within `rel_tol`.
    pub fn check_hermitian(&self, rel_tol: R) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotHermitian(format!("matrix is {}x{}, not square", self.rows, self.cols)));
        }
        let defect = self.hermiticity_defect();
        let scale = self.max_abs();
        if defect > rel_tol * scale {
            return Err(Error::NotHermitian(format!(
                "max |M - M^dagger| = {defect:e} exceeds {rel_tol:e} * max|M| = {:e}",
                rel_tol * scale
            )));
        }
        Ok(())
    }

    /// Direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            out.row_mut(i)[..self.cols].copy_from_slice(self.row(i));
        }
        for i in 0..other.rows {
            let cols = self.cols;
            out.row_mut(self.rows + i)[cols..].copy_from_slice(other.row(i));
        }
        out
    }

    /// `⟨a|M|b⟩`.
    pub fn sandwich(&self, a: &ComplexVector<R>, b: &ComplexVector<R>) -> Complex<R> {
        a.inner(&self.matvec(b))
    }
}

impl<R> Index<(usize, usize)> for ComplexMatrix<R> {
    type Output = Complex<R>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<R> {
        &self.data[i * self.cols + j]
    }
}

impl<R> IndexMut<(usize, usize)> for ComplexMatrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<R> {
        &mut self.data[i * self.cols + j]
    }
}
