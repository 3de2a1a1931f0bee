//! Full verification: saturation, randomized fleet, spectator
//! invariance, depth oracle and integer duality, merged into one summary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::fleet::{randomized_product_fleet, FleetOptions};
use super::random::{random_block_ghz_state, random_hermitian};
use super::saturation::verify_saturation;
use super::{certified_depth, eta_max, uniform_eta_grid};
use crate::config::{Tolerances, MAX_DENSE_QUBITS, MAX_FLEET_QUBITS};
use crate::depth::{exhaustive_min_depth, finest_factorization};
use crate::error::{Error, Result};
use crate::model::embed_with_spectator;
use crate::numkit::{hermitian_eigendecomposition, ComplexVector};
use crate::qsl::{cyclic_frame, qsl_times};

pub const SPECTATOR_CASES: usize = 20;
pub const ORACLE_CASES: usize = 100;
pub const ORACLE_MAX_QUBITS: usize = 6;
pub const DUALITY_MAX_QUBITS: usize = 64;
pub const DUALITY_GRID: usize = 10_000;
pub const SPECTATOR_REL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { n_max: 8, trials: 200, seed: 0, tolerances: Tolerances::default() }
    }
}

/// Counts for one family of checks; `failures` holds each violating instance.
#[derive(Clone, Debug, Serialize)]
pub struct SectionSummary {
    pub name: String,
    pub total: usize,
    pub passed: usize,
    pub failures: Vec<Value>,
}

impl SectionSummary {
    fn new(name: &str) -> Self {
        Self { name: name.into(), total: 0, passed: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, instance: impl FnOnce() -> Value) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(instance());
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationSummary {
    pub schema: u32,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub sections: Vec<SectionSummary>,
    pub passed: bool,
}

impl VerificationSummary {
    pub fn section(&self, name: &str) -> Option<&SectionSummary> {
        self.sections.iter().find(|s| s.name == name)
    }
}

pub fn verify_saturation_sweep(n_max: usize, tol: &Tolerances) -> Result<SectionSummary> {
    let cases: Vec<(usize, usize)> = (1..=n_max).flat_map(|n| (1..=n).map(move |m| (n, m))).collect();
    let reports = cases.par_iter().map(|&(n, m)| verify_saturation(n, m, 1.0, tol)).collect::<Result<Vec<_>>>()?;
    let mut s = SectionSummary::new("saturation");
    for r in reports {
        s.record(r.passed, || serde_json::to_value(&r).unwrap_or(Value::Null));
    }
    Ok(s)
}

pub fn verify_fleet_sweep(n_max: usize, opts: &FleetOptions, tol: &Tolerances) -> Result<SectionSummary> {
    let mut s = SectionSummary::new("fleet");
    for n in 1..=n_max {
        for m in 1..=n {
            let report = randomized_product_fleet(n, m, opts, tol)?;
            for t in &report.trials {
                s.record(t.passed, || json!({ "n": n, "m": m, "trial": t }));
            }
        }
    }
    Ok(s)
}

/// Random Hermitian `H` on up to eight levels plus uncoupled levels, one of
/// which lies below the original ground state.
pub fn verify_spectator_invariance(cases: usize, seed: u64, tol: &Tolerances) -> Result<SectionSummary> {
    let mut s = SectionSummary::new("spectator_invariance");
    for case in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((1u64 << 63) | case as u64);
        let dim = rng.gen_range(2..=8);
        let h = random_hermitian(dim, 1.0, &mut rng);
        let psi0 = ComplexVector::basis(dim, 0);
        let spectrum = hermitian_eigendecomposition(&h)?.values;
        let (lo, hi) = (spectrum[0], spectrum[dim - 1]);
        let width = (hi - lo).max(1.0);
        let extra_count = rng.gen_range(1..=3);
        let mut extra = vec![lo - width * rng.gen_range(0.5..5.0)];
        extra.extend((1..extra_count).map(|_| rng.gen_range((lo - 5.0 * width)..(hi + 5.0 * width))));
        let (h_ext, psi_ext) = embed_with_spectator(&h, &psi0, &extra)?;

        let krylov = tol.krylov_tol;
        let base = qsl_times(&h, &psi0, &cyclic_frame(&h, &psi0, krylov)?)?;
        let ext = qsl_times(&h_ext, &psi_ext, &cyclic_frame(&h_ext, &psi_ext, krylov)?)?;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        let shifts = [rel(ext.tau_mt, base.tau_mt), rel(ext.tau_ml, base.tau_ml), rel(ext.tau_qsl, base.tau_qsl)];
        let ok = shifts.iter().all(|&d| d <= SPECTATOR_REL_TOL);
        s.record(ok, || {
            json!({ "case": case, "dim": dim, "extra_levels": extra, "base": base, "embedded": ext, "rel_shifts": shifts })
        });
    }
    Ok(s)
}

pub fn verify_depth_oracle(cases: usize, n_max: usize, seed: u64, eps_p: f64) -> Result<SectionSummary> {
    let mut s = SectionSummary::new("depth_oracle");
    if n_max == 0 {
        return Ok(s);
    }
    for case in 0..cases {
        let n = 1 + case % n_max;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((1u64 << 62) | case as u64);
        let (psi, generated) = random_block_ghz_state(n, &mut rng)?;
        let greedy = finest_factorization(&psi, n, eps_p)?;
        let (depth, exhaustive) = exhaustive_min_depth(&psi, n, eps_p)?;
        let ok = greedy.depth == depth && depth == generated.max_block_size();
        s.record(ok, || {
            json!({
                "case": case, "n": n,
                "generated": generated.blocks(),
                "greedy": greedy.partition.blocks(), "greedy_depth": greedy.depth,
                "exhaustive": exhaustive.blocks(), "exhaustive_depth": depth,
            })
        });
    }
    Ok(s)
}

/// Integer-only checks of the staircase against `η_max` and the smooth bound.
pub fn verify_integer_duality(n_max: usize, grid_points: usize, snap_tol: f64) -> Result<SectionSummary> {
    let mut s = SectionSummary::new("integer_duality");
    for n in 1..=n_max {
        for k in 1..=n {
            let eta = eta_max::<f64>(n, k)?;
            let d = certified_depth(n, eta, snap_tol)?.depth_certified;
            let ok = d <= k && (n % k != 0 || d == k);
            s.record(ok, || json!({ "n": n, "k": k, "eta_max": eta, "depth_certified": d }));
        }
    }
    let grid = uniform_eta_grid::<f64>(grid_points);
    for n in 1..=n_max {
        let mut bad = Vec::new();
        for &eta in &grid {
            let c = certified_depth(n, eta, snap_tol)?;
            let back = eta_max::<f64>(n, c.depth_certified)?;
            if c.depth_certified < c.smooth_bound || back < eta * (1.0 - snap_tol) {
                bad.push(json!({ "eta": eta, "certificate": c, "eta_max_of_depth": back }));
            }
        }
        s.total += grid.len();
        s.passed += grid.len() - bad.len();
        s.failures.extend(bad.into_iter().map(|b| json!({ "n": n, "grid_point": b })));
    }
    Ok(s)
}

/// Runs every section. Saturation covers `n ≤ min(n_max, 12)`, the fleet
/// `n ≤ min(n_max, 10)`, the depth oracle `n ≤ min(n_max, 6)`.
pub fn run_verification(cfg: &VerifyConfig) -> Result<VerificationSummary> {
    cfg.tolerances.validate()?;
    if cfg.n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if cfg.n_max > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge { n: cfg.n_max, max: MAX_DENSE_QUBITS });
    }
    let tol = &cfg.tolerances;
    let fleet = FleetOptions { trials: cfg.trials, seed: cfg.seed, ..FleetOptions::default() };
    let sections = vec![
        verify_saturation_sweep(cfg.n_max, tol)?,
        verify_fleet_sweep(cfg.n_max.min(MAX_FLEET_QUBITS), &fleet, tol)?,
        verify_spectator_invariance(SPECTATOR_CASES, cfg.seed, tol)?,
        verify_depth_oracle(ORACLE_CASES, cfg.n_max.min(ORACLE_MAX_QUBITS), cfg.seed, tol.eps_p)?,
        verify_integer_duality(DUALITY_MAX_QUBITS, DUALITY_GRID, tol.snap_tol)?,
    ];
    let passed = sections.iter().all(SectionSummary::all_passed);
    Ok(VerificationSummary { schema: 1, n_max: cfg.n_max, trials: cfg.trials, seed: cfg.seed, sections, passed })
}
