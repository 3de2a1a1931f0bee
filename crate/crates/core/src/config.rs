//! Default tolerances and grid sizes.
//!
//! Every numerical threshold used by the crate is listed here; [`Tolerances`]
//! carries them at run time so callers (the CLI in particular) can override them.

use serde::{Deserialize, Serialize};

/// Hermiticity check: `max|M − M†| ≤ tol · max|M|`.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;
/// Eigendecomposition reconstruction target.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;
/// Krylov termination on relative post-projection norm.
pub const KRYLOV_TOL: f64 = 1e-10;
/// Complete-charging infidelity threshold.
pub const CHARGING_EPS: f64 = 1e-9;
/// Coarse scan points for charging detection.
pub const CHARGING_GRID: usize = 2048;
/// Relative time accuracy of the charging-time refinement.
pub const CHARGING_TIME_REL_TOL: f64 = 1e-10;
/// Block purity threshold `1 − eps_p` for product certificates.
pub const PURITY_EPS: f64 = 1e-8;
/// Integer snapping tolerance for `η⁻²` and `nη²`.
pub const SNAP_TOL: f64 = 1e-9;
/// Trajectory depth samples over `[0, T]`.
pub const DEPTH_SAMPLES: usize = 201;
/// Central-difference step for block speeds, relative to `T`.
pub const FD_STEP_REL: f64 = 1e-6;
/// Allowed deviation of `‖ψ‖` from one.
pub const NORM_TOL: f64 = 1e-10;
/// Largest register handled densely.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Largest register used by the randomized product fleet.
pub const MAX_FLEET_QUBITS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub krylov_tol: f64,
    pub eps_c: f64,
    pub charging_grid: usize,
    pub charging_time_rel_tol: f64,
    pub eps_p: f64,
    pub snap_tol: f64,
    pub depth_samples: usize,
    pub fd_step_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            krylov_tol: KRYLOV_TOL,
            eps_c: CHARGING_EPS,
            charging_grid: CHARGING_GRID,
            charging_time_rel_tol: CHARGING_TIME_REL_TOL,
            eps_p: PURITY_EPS,
            snap_tol: SNAP_TOL,
            depth_samples: DEPTH_SAMPLES,
            fd_step_rel: FD_STEP_REL,
        }
    }
}

impl Tolerances {
    /// Rejects non-positive tolerances and degenerate grids.
    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            ("krylov_tol", self.krylov_tol),
            ("eps_c", self.eps_c),
            ("charging_time_rel_tol", self.charging_time_rel_tol),
            ("eps_p", self.eps_p),
            ("snap_tol", self.snap_tol),
            ("fd_step_rel", self.fd_step_rel),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.charging_grid < 3 {
            return Err(crate::Error::InvalidArgument("charging grid needs at least 3 points".into()));
        }
        if self.depth_samples < 3 {
            return Err(crate::Error::InvalidArgument("depth profile needs at least 3 samples".into()));
        }
        Ok(())
    }
}
