//! Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit-shift QL iteration.

use num_complex::Complex;

use super::{ComplexMatrix, Real};
use crate::config::HERMITIAN_REL_TOL;
use crate::error::{Error, Result};

/// `M = V diag(values) V†`, eigenvalues ascending, eigenvectors in the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<R> {
    pub values: Vec<R>,
    pub vectors: ComplexMatrix<R>,
}

impl<R: Real> HermitianEigen<R> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `‖MV − V diag(λ)‖_F / max(‖M‖_F, tiny)`.
    pub fn relative_residual(&self, m: &ComplexMatrix<R>) -> R {
        let mv = m.matmul(&self.vectors);
        let n = self.dim();
        let mut acc = R::zero();
        for i in 0..n {
            for j in 0..n {
                acc += (mv[(i, j)] - self.vectors[(i, j)] * self.values[j]).norm_sqr();
            }
        }
        acc.sqrt() / m.frobenius_norm().max(R::min_positive_value())
    }

    /// `max |V†V − I|`.
    pub fn orthogonality_defect(&self) -> R {
        let g = self.vectors.adjoint().matmul(&self.vectors);
        let id = ComplexMatrix::identity(self.dim());
        g.sub(&id).max_abs()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is checked against `max|M − M†| ≤ tol · max|M|` and symmetrized
/// before reduction.
pub fn hermitian_eigendecomposition<R: Real>(m: &ComplexMatrix<R>) -> Result<HermitianEigen<R>> {
    m.check_hermitian(R::tol(HERMITIAN_REL_TOL))?;
    let n = m.rows();
    let half = R::lit(0.5);
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * half);

    let mut diag = vec![R::zero(); n];
    let mut offdiag = vec![R::zero(); n];
    let reflectors = tridiagonalize(&mut a, &mut diag, &mut offdiag);
    let q = accumulate_reflectors(n, &reflectors);

    // zt holds eigenvectors of the tridiagonal matrix as rows.
    let mut zt = vec![R::zero(); n * n];
    for i in 0..n {
        zt[i * n + i] = R::one();
    }
    tridiagonal_ql(&mut diag, &mut offdiag, &mut zt, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let qrow = q.row(r);
        let out = vectors.row_mut(r);
        for (col, &src) in order.iter().enumerate() {
            let zrow = &zt[src * n..(src + 1) * n];
            out[col] = qrow.iter().zip(zrow).fold(Complex::new(R::zero(), R::zero()), |acc, (qv, &z)| acc + qv * z);
        }
    }
    Ok(HermitianEigen { values, vectors })
}

struct Reflector<R> {
    /// First row the reflector acts on.
    start: usize,
    tau: Complex<R>,
    /// `v[0] = 1`; acts on rows `start..n`.
    v: Vec<Complex<R>>,
}

/// Reduces `a` in place to `Q† A Q = T` with `T` real tridiagonal.
fn tridiagonalize<R: Real>(a: &mut ComplexMatrix<R>, diag: &mut [R], offdiag: &mut [R]) -> Vec<Reflector<R>> {
    let n = a.rows();
    let zero = Complex::new(R::zero(), R::zero());
    let mut reflectors = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        diag[k] = a[(k, k)].re;
        let start = k + 1;
        let alpha = a[(start, k)];
        let xnorm = ((start + 1)..n).map(|i| a[(i, k)].norm_sqr()).sum::<R>().sqrt();

        let s = n - start;
        let mut v = vec![zero; s];
        v[0] = Complex::new(R::one(), R::zero());
        let (tau, beta) = if xnorm == R::zero() && alpha.im == R::zero() {
            (zero, alpha.re)
        } else {
            let mag = alpha.re.hypot(alpha.im).hypot(xnorm);
            let beta = if alpha.re >= R::zero() { -mag } else { mag };
            let tau = Complex::new((beta - alpha.re) / beta, -alpha.im / beta);
            let scale = Complex::new(R::one(), R::zero()) / (alpha - Complex::new(beta, R::zero()));
            for (i, vi) in v.iter_mut().enumerate().skip(1) {
                *vi = a[(start + i, k)] * scale;
            }
            (tau, beta)
        };
        offdiag[k] = beta;

        if tau != zero {
            // A22 <- H† A22 H = A22 - w v† - v w†, w = τp - ½|τ|²(v†p)v, p = A22 v.
            let mut p = vec![zero; s];
            for (i, pi) in p.iter_mut().enumerate() {
                let row = &a.row(start + i)[start..];
                *pi = row.iter().zip(&v).fold(zero, |acc, (x, y)| acc + x * y);
            }
            let vp = v.iter().zip(&p).fold(zero, |acc, (x, y)| acc + x.conj() * y).re;
            let coef = tau.norm_sqr() * vp * R::lit(0.5);
            let w: Vec<Complex<R>> = p.iter().zip(&v).map(|(pi, vi)| tau * pi - vi * coef).collect();
            for i in 0..s {
                let (wi, vi) = (w[i], v[i]);
                let row = &mut a.row_mut(start + i)[start..];
                for j in 0..s {
                    row[j] -= wi * v[j].conj() + vi * w[j].conj();
                }
            }
        }
        reflectors.push(Reflector { start, tau, v });
    }
    if n > 0 {
        diag[n - 1] = a[(n - 1, n - 1)].re;
        offdiag[n - 1] = R::zero();
    }
    reflectors
}

/// `Q = H_0 H_1 ⋯ H_{n-2}`.
fn accumulate_reflectors<R: Real>(n: usize, reflectors: &[Reflector<R>]) -> ComplexMatrix<R> {
    let zero = Complex::new(R::zero(), R::zero());
    let mut q = ComplexMatrix::identity(n);
    let mut tmp = vec![zero; n];
    for refl in reflectors.iter().rev() {
        if refl.tau == zero {
            continue;
        }
        let st = refl.start;
        // Columns < st of rows >= st are still zero.
        tmp[st..].iter_mut().for_each(|t| *t = zero);
        for (i, vi) in refl.v.iter().enumerate() {
            let vc = vi.conj();
            for (t, qv) in tmp[st..].iter_mut().zip(&q.row(st + i)[st..]) {
                *t += vc * qv;
            }
        }
        for (i, vi) in refl.v.iter().enumerate() {
            let f = refl.tau * vi;
            let row = &mut q.row_mut(st + i)[st..];
            for (qv, t) in row.iter_mut().zip(&tmp[st..]) {
                *qv -= f * t;
            }
        }
    }
    q
}

/// Implicit QL on a symmetric tridiagonal matrix (`offdiag[i]` couples `i` and `i+1`).
///
/// Rotations are accumulated into the rows of `zt`.
fn tridiagonal_ql<R: Real>(d: &mut [R], e: &mut [R], zt: &mut [R], n: usize) -> Result<()> {
    if n <= 1 {
        return Ok(());
    }
    e[n - 1] = R::zero();
    let eps = R::epsilon();
    let two = R::lit(2.0);
    let max_iter = 30 * n.max(10);
    let mut f = R::zero();
    let mut tst1 = R::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NoConvergence(format!("QL iteration stalled at index {l}")));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(R::one());
                if p < R::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = R::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = R::zero();
                let mut s2 = R::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (lo, hi) = zt.split_at_mut((i + 1) * n);
                    let row_i = &mut lo[i * n..];
                    let row_next = &mut hi[..n];
                    for (zi, zn) in row_i.iter_mut().zip(row_next.iter_mut()) {
                        let hval = *zn;
                        *zn = s * *zi + c * hval;
                        *zi = c * *zi - s * hval;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = R::zero();
    }
    Ok(())
}
