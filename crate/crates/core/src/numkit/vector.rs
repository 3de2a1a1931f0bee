use std::ops::{Index, IndexMut};

use num_complex::Complex;
use serde::Serialize;

use super::Real;
use crate::error::{Error, Result};

/// Dense complex column vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexVector<R> {
    data: Vec<Complex<R>>,
}

impl<R: Real> ComplexVector<R> {
    /// Wraps `data`, rejecting empty or non-finite entries.
    pub fn new(data: Vec<Complex<R>>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Dimension("vector must have positive dimension".into()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("vector entries".into()));
        }
        Ok(Self { data })
    }

    pub(crate) fn from_vec_unchecked(data: Vec<Complex<R>>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![Complex::new(R::zero(), R::zero()); dim] }
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = Complex::new(R::one(), R::zero());
        v
    }

    pub fn from_real(values: &[R]) -> Self {
        Self { data: values.iter().map(|&x| Complex::new(x, R::zero())).collect() }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex<R>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<R>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex<R>> {
        self.data
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<R> {
        debug_assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(&other.data).fold(Complex::new(R::zero(), R::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn norm_sqr(&self) -> R {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> R {
        self.norm_sqr().sqrt()
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == R::zero() {
            return None;
        }
        Some(self.scaled(Complex::new(n.recip(), R::zero())))
    }

    pub fn scaled(&self, s: Complex<R>) -> Self {
        Self { data: self.data.iter().map(|z| z * s).collect() }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: Complex<R>, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    /// Tensor product `self ⊗ other`; `self` occupies the more significant bits.
    pub fn kron(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            data.extend(other.data.iter().map(|b| a * b));
        }
        Self { data }
    }

    /// `|⟨self|other⟩|²` for normalized vectors.
    pub fn fidelity(&self, other: &Self) -> R {
        self.inner(other).norm_sqr()
    }

    /// Euclidean distance after removing the optimal relative phase.
    ///
    /// Computed from component differences rather than from `1 - |⟨a|b⟩|`,
    /// which keeps full relative precision for nearby rays.
    pub fn ray_chord(&self, other: &Self) -> R {
        let ov = other.inner(self);
        let phase = if ov.norm() == R::zero() {
            Complex::new(R::one(), R::zero())
        } else {
            ov / Complex::new(ov.norm(), R::zero())
        };
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b * phase).norm_sqr()).sum::<R>().sqrt()
    }

    pub fn max_abs(&self) -> R {
        self.data.iter().map(|z| z.norm()).fold(R::zero(), R::max)
    }
}

impl<R> Index<usize> for ComplexVector<R> {
    type Output = Complex<R>;
    fn index(&self, i: usize) -> &Complex<R> {
        &self.data[i]
    }
}

impl<R> IndexMut<usize> for ComplexVector<R> {
    fn index_mut(&mut self, i: usize) -> &mut Complex<R> {
        &mut self.data[i]
    }
}
