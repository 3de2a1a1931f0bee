//! End-to-end analysis of one charging orbit: charging time, speed limits,
//! trajectory depth and the resulting certificate.

use serde::Serialize;

use crate::config::Tolerances;
use crate::depth::{trajectory_depth, DepthOptions, DepthProfile};
use crate::dynamics::{find_complete_charging_time, ChargingOptions, ChargingOutcome, Propagator};
use crate::error::{Error, Result};
use crate::frontier::{certified_depth, Certificate};
use crate::numkit::qubits::qubit_count;
use crate::numkit::{ComplexMatrix, ComplexVector, Real};
use crate::qsl::{cyclic_frame, qsl_report, qsl_times, QslReport, QslTimes};

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport<R> {
    pub n: Option<usize>,
    pub outcome: ChargingOutcome<R>,
    pub qsl_times: QslTimes<R>,
    pub qsl: Option<QslReport<R>>,
    pub depth: Option<DepthProfile<R>>,
    pub certificate: Option<Certificate<R>>,
}

impl<R: Real> SimulationReport<R> {
    pub fn is_charged(&self) -> bool {
        matches!(self.outcome, ChargingOutcome::Charged(_))
    }

    pub fn eta(&self) -> Option<R> {
        self.qsl.and_then(|q| q.eta)
    }
}

fn charging_options<R: Real>(tol: &Tolerances) -> ChargingOptions<R> {
    ChargingOptions {
        eps_c: R::lit(tol.eps_c),
        grid_points: tol.charging_grid,
        rel_time_tol: R::tol(tol.charging_time_rel_tol),
    }
}

/// Charging outcome and speed limits of an orbit.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChargingRate<R> {
    pub outcome: ChargingOutcome<R>,
    pub qsl_times: QslTimes<R>,
    pub qsl: Option<QslReport<R>>,
}

/// Charging outcome and speed limits only, without the depth profile.
pub fn charging_rate<R: Real>(
    prop: &Propagator<R>,
    psi0: &ComplexVector<R>,
    target: &ComplexVector<R>,
    t_max: R,
    tol: &Tolerances,
) -> Result<ChargingRate<R>> {
    tol.validate()?;
    let h = prop.hamiltonian();
    let orbit = prop.orbit(psi0)?;
    let outcome = find_complete_charging_time(&orbit, target, t_max, &charging_options(tol))?;
    let frame = cyclic_frame(h, psi0, R::tol(tol.krylov_tol))?;
    let times = qsl_times(h, psi0, &frame)?;
    let qsl = outcome.event().map(|e| qsl_report(h, psi0, &frame, e)).transpose()?;
    Ok(ChargingRate { outcome, qsl_times: times, qsl })
}

/// Runs the analysis with a prebuilt propagator.
///
/// Depth and certificate are computed only for qubit registers (`dim = 2^n`)
/// that charge; a rate above one beyond `snap_tol` is reported as an error.
pub fn analyze_orbit<R: Real>(
    prop: &Propagator<R>,
    psi0: &ComplexVector<R>,
    target: &ComplexVector<R>,
    t_max: R,
    tol: &Tolerances,
) -> Result<SimulationReport<R>> {
    let ChargingRate { outcome, qsl_times, qsl } = charging_rate(prop, psi0, target, t_max, tol)?;
    let n = qubit_count(prop.dim()).ok();
    let mut report = SimulationReport { n, outcome, qsl_times, qsl, depth: None, certificate: None };
    let (Some(event), Some(qsl), Some(n)) = (outcome.event(), qsl, n) else {
        return Ok(report);
    };
    let orbit = prop.orbit(psi0)?;
    let opts = DepthOptions { samples: tol.depth_samples, eps_p: R::lit(tol.eps_p), refine: false };
    report.depth = Some(trajectory_depth(&orbit, n, event.t_charge, &opts)?);
    if let Some(eta) = qsl.eta {
        report.certificate = Some(certified_depth(n, eta, R::lit(tol.snap_tol))?);
    }
    Ok(report)
}

pub fn simulate<R: Real>(
    h: &ComplexMatrix<R>,
    psi0: &ComplexVector<R>,
    target: &ComplexVector<R>,
    t_max: R,
    tol: &Tolerances,
) -> Result<SimulationReport<R>> {
    if h.rows() != psi0.dim() || psi0.dim() != target.dim() {
        return Err(Error::Dimension("Hamiltonian, initial state and target must share a dimension".into()));
    }
    let prop = Propagator::new(h)?;
    analyze_orbit(&prop, psi0, target, t_max, tol)
}
