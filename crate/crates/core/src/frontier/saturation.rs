use serde::Serialize;

use super::certified_depth;
use super::report::{all_passed, Check};
use crate::config::{Tolerances, MAX_DENSE_QUBITS};
use crate::dynamics::Propagator;
use crate::error::{Error, Result};
use crate::model::{cluster_flip_hamiltonian, endpoint_states, BlockPartition, ClusterFlipSpec};
use crate::simulation::{analyze_orbit, SimulationReport};

pub const SATURATION_ETA_TOL: f64 = 1e-9;
pub const SATURATION_REL_TOL: f64 = 1e-10;

/// Outcome of simulating the balanced cluster flip for one `(n, m)`.
#[derive(Clone, Debug, Serialize)]
pub struct SaturationReport {
    pub n: usize,
    pub m: usize,
    pub g: f64,
    #[serde(rename = "T_design")]
    pub t_design: f64,
    pub eta: Option<f64>,
    pub ent_u: Option<usize>,
    pub depth_certified: Option<usize>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Builds the balanced `H_m` with `T = t_design`, simulates it and checks
/// that it sits exactly on the frontier.
pub fn verify_saturation(n: usize, m: usize, t_design: f64, tol: &Tolerances) -> Result<SaturationReport> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge { n, max: MAX_DENSE_QUBITS });
    }
    let spec = ClusterFlipSpec::from_charging_time(BlockPartition::balanced(n, m)?, t_design)?;
    let h = cluster_flip_hamiltonian(&spec)?;
    let (psi0, up) = endpoint_states::<f64>(n)?;
    let prop = Propagator::new(&h)?;
    let sim = analyze_orbit(&prop, &psi0, &up, 2.0 * t_design, tol)?;
    Ok(judge(n, m, &spec, &sim, tol))
}

fn judge(
    n: usize,
    m: usize,
    spec: &ClusterFlipSpec<f64>,
    sim: &SimulationReport<f64>,
    tol: &Tolerances,
) -> SaturationReport {
    let g = spec.g;
    let mf = m as f64;
    let mut checks = vec![Check::flag("charged", sim.is_charged())];
    let mut eta = None;
    let mut ent_u = None;
    let mut d_cert = None;
    if let Some(q) = sim.qsl {
        checks.push(Check::relative("delta_h", q.delta_h, g * mf.sqrt(), SATURATION_REL_TOL));
        checks.push(Check::relative("e_ml", q.e_ml, mf * g, SATURATION_REL_TOL));
        checks.push(Check::relative("t_charge", q.t_charge, std::f64::consts::FRAC_PI_2 / g, SATURATION_REL_TOL));
        checks.push(Check::flag("mt_branch_active", q.tau_mt >= q.tau_ml));
        if let Some(e) = q.eta {
            eta = Some(e);
            checks.push(Check::absolute("eta", e, 1.0 / mf.sqrt(), SATURATION_ETA_TOL));
            match certified_depth(n, e, tol.snap_tol) {
                Ok(c) => d_cert = Some(c.depth_certified),
                Err(_) => checks.push(Check::flag("eta_within_qsl", false)),
            }
        } else {
            checks.push(Check::flag("non_degenerate", false));
        }
    }
    if let Some(depth) = &sim.depth {
        ent_u = Some(depth.ent_u);
        let (d0, d1) = depth.endpoint_depths();
        checks.push(Check::exact("ent_u", depth.ent_u as f64, n.div_ceil(m) as f64));
        checks.push(Check::flag("endpoint_depths", d0 == 1 && d1 == 1));
        if let Some(dc) = d_cert {
            checks.push(Check::exact("certified_equals_ent_u", dc as f64, depth.ent_u as f64));
        }
    }
    let passed = all_passed(&checks);
    SaturationReport { n, m, g, t_design: spec.t_charge, eta, ent_u, depth_certified: d_cert, checks, passed }
}
