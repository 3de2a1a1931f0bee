//! Cyclic subspace of the orbit and the Mandelstam–Tamm / Margolus–Levitin report.

use serde::Serialize;

use crate::config::KRYLOV_TOL;
use crate::dynamics::{fs_speed, ChargingEvent};
use crate::error::{Error, Result};
use crate::numkit::{hermitian_eigendecomposition, ComplexMatrix, ComplexVector, OrthonormalSet, Real};

/// Orthonormal basis of `K = span{Hʲψ₀}` and `H` restricted to it.
#[derive(Clone, Debug)]
pub struct CyclicFrame<R> {
    pub basis: Vec<ComplexVector<R>>,
    pub restricted_h: ComplexMatrix<R>,
    pub e_min_k: R,
    pub dim_k: usize,
}

impl<R: Real> CyclicFrame<R> {
    /// `max |B†B − I|`.
    pub fn orthonormality_defect(&self) -> R {
        let mut worst = R::zero();
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let expect = if i == j { R::one() } else { R::zero() };
                worst = worst.max((a.inner(b) - num_complex::Complex::new(expect, R::zero())).norm());
            }
        }
        worst
    }

    /// Norm of the component of `v` outside `K`.
    pub fn residual(&self, v: &ComplexVector<R>) -> R {
        let mut r = v.clone();
        for q in &self.basis {
            let c = q.inner(&r);
            r.axpy(-c, q);
        }
        r.norm()
    }
}

/// Krylov construction of the cyclic subspace.
///
/// Each new direction is `H q_last`, orthogonalized against the current basis
/// (same span as `ψ₀, Hψ₀, H²ψ₀, …`); iteration stops once the post-projection
/// norm drops below `tol` relative to `‖H q_last‖`.
pub fn cyclic_frame<R: Real>(h: &ComplexMatrix<R>, psi0: &ComplexVector<R>, tol: R) -> Result<CyclicFrame<R>> {
    if !h.is_square() || h.rows() != psi0.dim() {
        return Err(Error::Dimension("state and Hamiltonian dimensions differ".into()));
    }
    let mut set = OrthonormalSet::new();
    if !set.try_push(psi0, tol) {
        return Err(Error::InvalidArgument("initial state is zero".into()));
    }
    let mut images = Vec::new();
    loop {
        let last = set.vectors().last().expect("nonempty").clone();
        let next = h.matvec(&last);
        images.push(next.clone());
        if set.len() == psi0.dim() || !set.try_push(&next, tol) {
            break;
        }
    }
    let basis = set.into_vectors();
    let k = basis.len();
    // B†HB; images[j] = H b_j for j < k.
    let mut restricted_h = ComplexMatrix::from_fn(k, k, |i, j| basis[i].inner(&images[j]));
    let half = R::lit(0.5);
    for i in 0..k {
        for j in i..k {
            let avg = (restricted_h[(i, j)] + restricted_h[(j, i)].conj()) * half;
            restricted_h[(i, j)] = avg;
            restricted_h[(j, i)] = avg.conj();
        }
    }
    let e_min_k = hermitian_eigendecomposition(&restricted_h)?.values[0];
    Ok(CyclicFrame { basis, restricted_h, e_min_k, dim_k: k })
}

pub fn cyclic_frame_default(h: &ComplexMatrix<f64>, psi0: &ComplexVector<f64>) -> Result<CyclicFrame<f64>> {
    cyclic_frame(h, psi0, KRYLOV_TOL)
}

/// Speed-limit times of an orbit, independent of any charging time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QslTimes<R> {
    pub delta_h: R,
    pub e_ml: R,
    pub tau_mt: R,
    pub tau_ml: R,
    pub tau_qsl: R,
    pub dim_k: usize,
    /// Stationary orbit (`ΔH = 0` or `⟨H⟩_ML ≤ 0`).
    pub degenerate: bool,
}

/// `ΔH` in `ψ₀`; `⟨H⟩_ML = ⟨ψ₀|H|ψ₀⟩ − E_min` on the cyclic subspace; `τ = π/(2·)`.
pub fn qsl_times<R: Real>(
    h: &ComplexMatrix<R>,
    psi0: &ComplexVector<R>,
    frame: &CyclicFrame<R>,
) -> Result<QslTimes<R>> {
    let delta_h = fs_speed(h, psi0)?;
    let mean = h.sandwich(psi0, psi0).re / psi0.norm_sqr();
    let e_ml = mean - frame.e_min_k;
    let half_pi = R::FRAC_PI_2();
    let degenerate = frame.dim_k <= 1 || delta_h <= R::zero() || e_ml <= R::zero();
    let tau = |x: R| if x > R::zero() { half_pi / x } else { R::infinity() };
    let (tau_mt, tau_ml) = (tau(delta_h), tau(e_ml));
    Ok(QslTimes { delta_h, e_ml, tau_mt, tau_ml, tau_qsl: tau_mt.max(tau_ml), dim_k: frame.dim_k, degenerate })
}

/// Speed-limit report of a complete-charging orbit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QslReport<R> {
    pub delta_h: R,
    pub e_ml: R,
    pub tau_mt: R,
    pub tau_ml: R,
    pub tau_qsl: R,
    pub t_charge: R,
    /// `τ_QSL / T`; absent for degenerate orbits.
    pub eta: Option<R>,
    pub dim_k: usize,
    pub degenerate: bool,
}

impl<R: Real> QslReport<R> {
    pub fn times(&self) -> QslTimes<R> {
        QslTimes {
            delta_h: self.delta_h,
            e_ml: self.e_ml,
            tau_mt: self.tau_mt,
            tau_ml: self.tau_ml,
            tau_qsl: self.tau_qsl,
            dim_k: self.dim_k,
            degenerate: self.degenerate,
        }
    }

    /// `τ_ML / T`.
    pub fn ml_ratio(&self) -> R {
        self.tau_ml / self.t_charge
    }
}

pub fn qsl_report<R: Real>(
    h: &ComplexMatrix<R>,
    psi0: &ComplexVector<R>,
    frame: &CyclicFrame<R>,
    event: &ChargingEvent<R>,
) -> Result<QslReport<R>> {
    if !(event.t_charge > R::zero()) {
        return Err(Error::InvalidArgument("charging time must be positive".into()));
    }
    let t = qsl_times(h, psi0, frame)?;
    Ok(QslReport {
        delta_h: t.delta_h,
        e_ml: t.e_ml,
        tau_mt: t.tau_mt,
        tau_ml: t.tau_ml,
        tau_qsl: t.tau_qsl,
        t_charge: event.t_charge,
        eta: (!t.degenerate).then(|| t.tau_qsl / event.t_charge),
        dim_k: t.dim_k,
        degenerate: t.degenerate,
    })
}
