//! Randomized product-block trajectories that probe the upper bound.
//!
//! Each trial charges `m` balanced blocks independently: block `μ` carries
//! `g_μ X_μ` with `g_μ = (2a_μ + 1)·π/(2T)`, so every block completes an odd
//! number of half-flips at the common design time `T`. Optionally a random
//! Hermitian term acts on a block's complement of `span{D_μ, U_μ}`; it never
//! touches the orbit.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::certified_depth;
use super::random::random_hermitian;
use super::report::{all_passed, Check};
use crate::config::{Tolerances, MAX_FLEET_QUBITS};
use crate::dynamics::Propagator;
use crate::error::{Error, Result};
use crate::model::{block_flip_hamiltonian, embed_block_operator, endpoint_states, BlockPartition};
use crate::numkit::ComplexMatrix;
use crate::simulation::{analyze_orbit, charging_rate};

pub const FLEET_BOUND_TOL: f64 = 1e-9;
pub const SPECTATOR_ETA_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FleetOptions {
    pub trials: usize,
    pub seed: u64,
    /// `a_μ` drawn uniformly from `0..=max_half_flips`.
    pub max_half_flips: u64,
    pub spectator_probability: f64,
    #[serde(rename = "T_design")]
    pub t_design: f64,
}

impl Default for FleetOptions {
    fn default() -> Self {
        Self { trials: 200, seed: 0, max_half_flips: 3, spectator_probability: 0.5, t_design: 1.0 }
    }
}

/// Random draws of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialParameters {
    /// `2a_μ + 1` per block.
    pub odd_multiples: Vec<u64>,
    /// Block index and its local spectator operator.
    pub spectators: Vec<(usize, ComplexMatrix<f64>)>,
}

fn trial_rng(n: usize, m: usize, seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 48) | ((m as u64) << 32) | index as u64);
    rng
}

/// Deterministic in `(n, m, seed, index)`.
pub fn trial_parameters(partition: &BlockPartition, seed: u64, index: usize, opts: &FleetOptions) -> TrialParameters {
    let (n, m) = (partition.n(), partition.num_blocks());
    let mut rng = trial_rng(n, m, seed, index);
    let odd_multiples = (0..m).map(|_| 2 * rng.gen_range(0..=opts.max_half_flips) + 1).collect();
    let g = std::f64::consts::FRAC_PI_2 / opts.t_design;
    let mut spectators = Vec::new();
    for (mu, block) in partition.blocks().iter().enumerate() {
        if block.len() < 2 || !rng.gen_bool(opts.spectator_probability) {
            continue;
        }
        let d = 1usize << block.len();
        let inner = random_hermitian(d - 2, g, &mut rng);
        let local = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == 0 || j == 0 || i == d - 1 || j == d - 1 {
                Complex::new(0.0, 0.0)
            } else {
                inner[(i - 1, j - 1)]
            }
        });
        spectators.push((mu, local));
    }
    TrialParameters { odd_multiples, spectators }
}

pub fn trial_hamiltonian(
    partition: &BlockPartition,
    params: &TrialParameters,
    t_design: f64,
    with_spectators: bool,
) -> Result<ComplexMatrix<f64>> {
    let g = std::f64::consts::FRAC_PI_2 / t_design;
    let couplings: Vec<f64> = params.odd_multiples.iter().map(|&o| g * o as f64).collect();
    let mut h = block_flip_hamiltonian(partition, &couplings)?;
    if with_spectators {
        for (mu, local) in &params.spectators {
            h = h.add(&embed_block_operator(local, &partition.blocks()[*mu], partition.n())?);
        }
    }
    Ok(h)
}

#[derive(Clone, Debug, Serialize)]
pub struct FleetTrial {
    pub index: usize,
    pub odd_multiples: Vec<u64>,
    pub spectator_blocks: Vec<usize>,
    #[serde(rename = "T")]
    pub t_charge: Option<f64>,
    pub eta: Option<f64>,
    pub tau_ml_over_t: Option<f64>,
    pub ent_u: Option<usize>,
    pub depth_certified: Option<usize>,
    /// `|η(with spectators) − η(without)|`.
    pub spectator_eta_shift: Option<f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FleetCounts {
    pub total: usize,
    pub charged: usize,
    pub eta_bound: usize,
    pub ml_bound: usize,
    pub witness_sound: usize,
    pub endpoint_depths: usize,
    pub spectator_trials: usize,
    pub spectator_invariant: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FleetReport {
    pub n: usize,
    pub m: usize,
    pub options: FleetOptions,
    pub counts: FleetCounts,
    pub trials: Vec<FleetTrial>,
    pub passed: bool,
}

impl FleetReport {
    pub fn failures(&self) -> impl Iterator<Item = &FleetTrial> {
        self.trials.iter().filter(|t| !t.passed)
    }
}

fn run_trial(partition: &BlockPartition, index: usize, opts: &FleetOptions, tol: &Tolerances) -> Result<FleetTrial> {
    let (n, m) = (partition.n(), partition.num_blocks());
    let params = trial_parameters(partition, opts.seed, index, opts);
    let (psi0, up) = endpoint_states::<f64>(n)?;
    let t_max = 2.0 * opts.t_design;
    let h = trial_hamiltonian(partition, &params, opts.t_design, true)?;
    let sim = analyze_orbit(&Propagator::new(&h)?, &psi0, &up, t_max, tol)?;

    let mut checks = vec![Check::flag("charged", sim.is_charged())];
    let mf = m as f64;
    let mut trial = FleetTrial {
        index,
        odd_multiples: params.odd_multiples.clone(),
        spectator_blocks: params.spectators.iter().map(|(mu, _)| *mu).collect(),
        t_charge: sim.qsl.map(|q| q.t_charge),
        eta: sim.eta(),
        tau_ml_over_t: sim.qsl.map(|q| q.ml_ratio()),
        ent_u: sim.depth.as_ref().map(|d| d.ent_u),
        depth_certified: sim.certificate.map(|c| c.depth_certified),
        spectator_eta_shift: None,
        checks: Vec::new(),
        passed: false,
    };
    if let (Some(eta), Some(ml)) = (trial.eta, trial.tau_ml_over_t) {
        checks.push(Check::at_most("eta_bound", eta, 1.0 / mf.sqrt(), FLEET_BOUND_TOL));
        checks.push(Check::at_most("ml_bound", ml, 1.0 / mf, FLEET_BOUND_TOL));
        let dc = certified_depth(n, eta, tol.snap_tol).map(|c| c.depth_certified).unwrap_or(usize::MAX);
        checks.push(Check::at_least("witness_sound", trial.ent_u.unwrap_or(0) as f64, dc as f64));
    } else if sim.is_charged() {
        checks.push(Check::flag("non_degenerate", false));
    }
    if let Some(depth) = &sim.depth {
        let (d0, d1) = depth.endpoint_depths();
        checks.push(Check::flag("endpoint_depths", d0 == 1 && d1 == 1));
    }
    if !params.spectators.is_empty() {
        let bare = trial_hamiltonian(partition, &params, opts.t_design, false)?;
        let bare_rate = charging_rate(&Propagator::new(&bare)?, &psi0, &up, t_max, tol)?;
        let shift = match (sim.eta(), bare_rate.qsl.and_then(|q| q.eta)) {
            (Some(a), Some(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        };
        trial.spectator_eta_shift = Some(shift);
        checks.push(Check::at_most("spectator_invariant", shift, 0.0, SPECTATOR_ETA_TOL));
    }
    trial.passed = all_passed(&checks);
    trial.checks = checks;
    Ok(trial)
}

/// Runs `opts.trials` independent trials for balanced `m` blocks on `n` qubits.
pub fn randomized_product_fleet(n: usize, m: usize, opts: &FleetOptions, tol: &Tolerances) -> Result<FleetReport> {
    if n > MAX_FLEET_QUBITS {
        return Err(Error::TooLarge { n, max: MAX_FLEET_QUBITS });
    }
    let partition = BlockPartition::balanced(n, m)?;
    if opts.trials > 0
        && trial_parameters(&partition, opts.seed, 0, opts) != trial_parameters(&partition, opts.seed, 0, opts)
    {
        return Err(Error::InvalidArgument("trial parameters are not reproducible from the seed".into()));
    }
    let trials =
        (0..opts.trials).into_par_iter().map(|i| run_trial(&partition, i, opts, tol)).collect::<Result<Vec<_>>>()?;
    let mut counts = FleetCounts { total: trials.len(), ..FleetCounts::default() };
    let ok = |t: &FleetTrial, name: &str| t.checks.iter().any(|c| c.name == name && c.passed);
    for t in &trials {
        counts.charged += usize::from(ok(t, "charged"));
        counts.eta_bound += usize::from(ok(t, "eta_bound"));
        counts.ml_bound += usize::from(ok(t, "ml_bound"));
        counts.witness_sound += usize::from(ok(t, "witness_sound"));
        counts.endpoint_depths += usize::from(ok(t, "endpoint_depths"));
        counts.spectator_trials += usize::from(!t.spectator_blocks.is_empty());
        counts.spectator_invariant += usize::from(ok(t, "spectator_invariant"));
    }
    let passed = trials.iter().all(|t| t.passed);
    Ok(FleetReport { n, m, options: *opts, counts, trials, passed })
}
