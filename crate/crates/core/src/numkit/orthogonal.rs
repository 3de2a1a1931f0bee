use num_complex::Complex;

use super::{ComplexVector, Real};

/// Incrementally grown orthonormal set.
#[derive(Clone, Debug)]
pub struct OrthonormalSet<R> {
    vectors: Vec<ComplexVector<R>>,
}

impl<R: Real> Default for OrthonormalSet<R> {
    fn default() -> Self {
        Self { vectors: Vec::new() }
    }
}

impl<R: Real> OrthonormalSet<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[ComplexVector<R>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<ComplexVector<R>> {
        self.vectors
    }

    /// Removes the components of `v` along the set (two passes of modified Gram–Schmidt).
    pub fn project_out(&self, v: &ComplexVector<R>) -> ComplexVector<R> {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &self.vectors {
                let c = q.inner(&r);
                r.axpy(-c, q);
            }
        }
        r
    }

    /// Orthogonalizes `v` against the set and appends it unless its residual
    /// norm falls below `tol · ‖v‖`. Returns whether it was appended.
    pub fn try_push(&mut self, v: &ComplexVector<R>, tol: R) -> bool {
        let original = v.norm();
        if original == R::zero() {
            return false;
        }
        let r = self.project_out(v);
        let rn = r.norm();
        if rn < tol * original {
            return false;
        }
        self.vectors.push(r.scaled(Complex::new(rn.recip(), R::zero())));
        true
    }
}

/// Orthonormalizes `vectors` in order, dropping any whose post-projection
/// norm is below `tol` relative to its own norm.
pub fn gram_schmidt_extend<R: Real>(vectors: &[ComplexVector<R>], tol: R) -> Vec<ComplexVector<R>> {
    let mut set = OrthonormalSet::new();
    for v in vectors {
        set.try_push(v, tol);
    }
    set.into_vectors()
}
