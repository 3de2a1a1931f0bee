//! Time evolution, complete-charging detection and Fubini–Study geometry.

use num_complex::Complex;
use serde::Serialize;

use crate::config::{CHARGING_EPS, CHARGING_GRID, CHARGING_TIME_REL_TOL, NORM_TOL};
use crate::depth::extract_block_state;
use crate::error::{Error, Result};
use crate::model::{BatterySpec, BlockPartition};
use crate::numkit::{hermitian_eigendecomposition, ComplexMatrix, ComplexVector, HermitianEigen, Real};

/// Eigendecomposition of one irreducible diagonal block of `H`.
#[derive(Clone, Debug)]
struct SpectralComponent<R> {
    indices: Vec<usize>,
    eig: HermitianEigen<R>,
}

/// Spectral form of a Hermitian `H`, used to evaluate `e^{−iHt}` exactly.
///
/// `H` is first split into the connected components of its nonzero pattern
/// (an exact permutation to block-diagonal form); each component is then
/// fully eigendecomposed.
#[derive(Clone, Debug)]
pub struct Propagator<R> {
    h: ComplexMatrix<R>,
    components: Vec<SpectralComponent<R>>,
}

fn connected_components<R: Real>(h: &ComplexMatrix<R>) -> Vec<Vec<usize>> {
    let n = h.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for (j, z) in h.row(i).iter().enumerate().skip(i + 1) {
            if z.re != R::zero() || z.im != R::zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

impl<R: Real> Propagator<R> {
    pub fn new(h: &ComplexMatrix<R>) -> Result<Self> {
        h.check_hermitian(R::tol(crate::config::HERMITIAN_REL_TOL))?;
        let components = connected_components(h)
            .into_iter()
            .map(|indices| {
                let block = ComplexMatrix::from_fn(indices.len(), indices.len(), |a, b| h[(indices[a], indices[b])]);
                hermitian_eigendecomposition(&block).map(|eig| SpectralComponent { indices, eig })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { h: h.clone(), components })
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix<R> {
        &self.h
    }

    /// Sizes of the irreducible blocks.
    pub fn component_sizes(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.indices.len()).collect()
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<R> {
        let mut v: Vec<R> = self.components.iter().flat_map(|c| c.eig.values.iter().copied()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        v
    }

    /// Prepares the orbit `e^{−iHt} ψ₀`.
    pub fn orbit(&self, psi0: &ComplexVector<R>) -> Result<Orbit<'_, R>> {
        if psi0.dim() != self.dim() {
            return Err(Error::Dimension(format!("state has dimension {}, Hamiltonian {}", psi0.dim(), self.dim())));
        }
        let coeffs = self.components.iter().map(|c| project(&c.eig.vectors, &c.indices, psi0)).collect();
        Ok(Orbit { prop: self, coeffs })
    }
}

/// `V† ψ` restricted to a component.
fn project<R: Real>(v: &ComplexMatrix<R>, indices: &[usize], psi: &ComplexVector<R>) -> Vec<Complex<R>> {
    let k = indices.len();
    let mut out = vec![Complex::new(R::zero(), R::zero()); k];
    for (a, &ia) in indices.iter().enumerate() {
        let x = psi[ia];
        if x.re == R::zero() && x.im == R::zero() {
            continue;
        }
        for (o, vv) in out.iter_mut().zip(v.row(a)) {
            *o += vv.conj() * x;
        }
    }
    out
}

/// `ψ(t) = e^{−iHt} ψ₀` in spectral form.
#[derive(Clone, Debug)]
pub struct Orbit<'a, R> {
    prop: &'a Propagator<R>,
    coeffs: Vec<Vec<Complex<R>>>,
}

impl<'a, R: Real> Orbit<'a, R> {
    pub fn propagator(&self) -> &'a Propagator<R> {
        self.prop
    }

    fn synthesize(&self, t: R, weight: impl Fn(R) -> R) -> ComplexVector<R> {
        let mut out = ComplexVector::zeros(self.prop.dim());
        for (comp, c) in self.prop.components.iter().zip(&self.coeffs) {
            if c.iter().all(|z| z.re == R::zero() && z.im == R::zero()) {
                continue;
            }
            let phased: Vec<Complex<R>> = comp
                .eig
                .values
                .iter()
                .zip(c)
                .map(|(&lam, &z)| z * Complex::from_polar(weight(lam), -lam * t))
                .collect();
            for (a, &ia) in comp.indices.iter().enumerate() {
                out[ia] = comp
                    .eig
                    .vectors
                    .row(a)
                    .iter()
                    .zip(&phased)
                    .fold(Complex::new(R::zero(), R::zero()), |acc, (v, p)| acc + v * p);
            }
        }
        out
    }

    /// `ψ(t)`.
    pub fn at(&self, t: R) -> ComplexVector<R> {
        self.synthesize(t, |_| R::one())
    }

    /// `H ψ(t)`.
    pub fn h_at(&self, t: R) -> ComplexVector<R> {
        self.synthesize(t, |lam| lam)
    }

    /// Energy mean and uncertainty of the orbit from its spectral weights.
    pub fn energy_moments(&self) -> (R, R) {
        let mut norm = R::zero();
        let mut m1 = R::zero();
        for (comp, c) in self.prop.components.iter().zip(&self.coeffs) {
            for (&lam, z) in comp.eig.values.iter().zip(c) {
                let p = z.norm_sqr();
                norm += p;
                m1 += p * lam;
            }
        }
        let mean = m1 / norm;
        let mut var = R::zero();
        for (comp, c) in self.prop.components.iter().zip(&self.coeffs) {
            for (&lam, z) in comp.eig.values.iter().zip(c) {
                var += z.norm_sqr() * (lam - mean).powi(2);
            }
        }
        (mean, (var / norm).sqrt())
    }

    /// Precomputes `⟨target|ψ(t)⟩ = Σ_j w_j e^{−iλ_j t}` for O(d) evaluation.
    pub fn overlap_trace(&self, target: &ComplexVector<R>) -> Result<OverlapTrace<R>> {
        if target.dim() != self.prop.dim() {
            return Err(Error::Dimension("target dimension differs from the Hamiltonian".into()));
        }
        let mut terms = Vec::new();
        for (comp, c) in self.prop.components.iter().zip(&self.coeffs) {
            let tv = project(&comp.eig.vectors, &comp.indices, target);
            for ((&lam, z), y) in comp.eig.values.iter().zip(c).zip(tv) {
                let w = y.conj() * z;
                if w.re != R::zero() || w.im != R::zero() {
                    terms.push((lam, w));
                }
            }
        }
        Ok(OverlapTrace { terms })
    }
}

/// `a(t) = ⟨target|ψ(t)⟩` as a finite exponential sum.
#[derive(Clone, Debug)]
pub struct OverlapTrace<R> {
    terms: Vec<(R, Complex<R>)>,
}

impl<R: Real> OverlapTrace<R> {
    pub fn amplitude(&self, t: R) -> Complex<R> {
        self.terms.iter().fold(Complex::new(R::zero(), R::zero()), |acc, &(lam, w)| {
            acc + w * Complex::from_polar(R::one(), -lam * t)
        })
    }

    pub fn fidelity(&self, t: R) -> R {
        self.amplitude(t).norm_sqr()
    }

    pub fn infidelity(&self, t: R) -> R {
        R::one() - self.fidelity(t)
    }

    /// `dF/dt = 2 Re(a* a')`.
    pub fn fidelity_rate(&self, t: R) -> R {
        let mut a = Complex::new(R::zero(), R::zero());
        let mut da = Complex::new(R::zero(), R::zero());
        for &(lam, w) in &self.terms {
            let z = w * Complex::from_polar(R::one(), -lam * t);
            a += z;
            da += z * Complex::new(R::zero(), -lam);
        }
        R::lit(2.0) * (a.conj() * da).re
    }
}

/// `e^{−iHt} ψ₀`.
pub fn evolve<R: Real>(h: &ComplexMatrix<R>, psi0: &ComplexVector<R>, t: R) -> Result<ComplexVector<R>> {
    let prop = Propagator::new(h)?;
    Ok(prop.orbit(psi0)?.at(t))
}

/// Instantaneous Fubini–Study speed `ΔH = ‖(H − ⟨H⟩)ψ‖` of a normalized state.
pub fn fs_speed<R: Real>(h: &ComplexMatrix<R>, psi: &ComplexVector<R>) -> Result<R> {
    if h.cols() != psi.dim() {
        return Err(Error::Dimension("state and Hamiltonian dimensions differ".into()));
    }
    let hpsi = h.matvec(psi);
    let mean = psi.inner(&hpsi).re;
    let mut r = hpsi;
    r.axpy(Complex::new(-mean, R::zero()), psi);
    Ok(r.norm())
}

/// Composite Simpson rule on `values` sampled with spacing `step` (odd count ≥ 3).
pub(crate) fn simpson<R: Real>(values: &[R], step: R) -> R {
    debug_assert!(values.len() >= 3 && values.len() % 2 == 1);
    let last = values.len() - 1;
    let mut acc = values[0] + values[last];
    for (i, &v) in values.iter().enumerate().take(last).skip(1) {
        acc += v * if i % 2 == 1 { R::lit(4.0) } else { R::lit(2.0) };
    }
    acc * step / R::lit(3.0)
}

fn simpson_points(requested: usize) -> usize {
    let p = requested.max(3);
    if p.is_multiple_of(2) {
        p + 1
    } else {
        p
    }
}

/// `L = ∫₀^T ΔH(ψ(t)) dt` by composite Simpson quadrature.
pub fn path_length<R: Real>(
    h: &ComplexMatrix<R>,
    psi0: &ComplexVector<R>,
    t_end: R,
    quadrature_points: usize,
) -> Result<R> {
    if !(t_end > R::zero()) {
        return Err(Error::InvalidArgument("path length needs T > 0".into()));
    }
    let prop = Propagator::new(h)?;
    let orbit = prop.orbit(psi0)?;
    let pts = simpson_points(quadrature_points);
    let step = t_end / R::lit((pts - 1) as f64);
    let speeds = (0..pts).map(|i| fs_speed(h, &orbit.at(step * R::lit(i as f64)))).collect::<Result<Vec<R>>>()?;
    Ok(simpson(&speeds, step))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChargingOptions<R> {
    pub eps_c: R,
    pub grid_points: usize,
    pub rel_time_tol: R,
}

impl<R: Real> Default for ChargingOptions<R> {
    fn default() -> Self {
        Self { eps_c: R::lit(CHARGING_EPS), grid_points: CHARGING_GRID, rel_time_tol: R::tol(CHARGING_TIME_REL_TOL) }
    }
}

/// First complete-charging time and the endpoint phase `⟨target|ψ(T)⟩ = e^{iφ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChargingEvent<R> {
    #[serde(rename = "T")]
    pub t_charge: R,
    pub phase: R,
    pub infidelity_at_t: R,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ChargingOutcome<R> {
    Charged(ChargingEvent<R>),
    /// Best grid point found, for diagnostics.
    NotCharged {
        best_time: R,
        best_infidelity: R,
    },
}

impl<R: Real> ChargingOutcome<R> {
    pub fn event(&self) -> Option<&ChargingEvent<R>> {
        match self {
            ChargingOutcome::Charged(e) => Some(e),
            ChargingOutcome::NotCharged { .. } => None,
        }
    }
}

/// Smallest `t ∈ (0, t_max]` with `1 − |⟨target|ψ(t)⟩|² ≤ eps_c`.
///
/// A uniform grid scan selects local infidelity minima inside the capture
/// band `max(½√eps_c, sin²(ΔH·δt/2))`; the second term bounds the infidelity
/// at the nearest grid point to any exact charging time. Candidates are then
/// refined in time order by bisection on `dF/dt`.
pub fn find_complete_charging_time<R: Real>(
    orbit: &Orbit<'_, R>,
    target: &ComplexVector<R>,
    t_max: R,
    opts: &ChargingOptions<R>,
) -> Result<ChargingOutcome<R>> {
    if !(t_max > R::zero() && t_max.is_finite()) {
        return Err(Error::InvalidArgument("t_max must be positive".into()));
    }
    if (target.norm() - R::one()).abs() > R::tol(NORM_TOL) {
        return Err(Error::NotNormalized(target.norm().to_f64_lossy()));
    }
    if opts.grid_points < 3 {
        return Err(Error::InvalidArgument("charging grid needs at least 3 points".into()));
    }
    let trace = orbit.overlap_trace(target)?;
    let g = opts.grid_points;
    let dt = t_max / R::lit((g - 1) as f64);
    let times: Vec<R> = (0..g).map(|i| dt * R::lit(i as f64)).collect();
    let infid: Vec<R> = times.iter().map(|&t| trace.infidelity(t)).collect();

    let (best_i, best_val) =
        infid
            .iter()
            .enumerate()
            .skip(1)
            .fold((1, R::infinity()), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    let not_charged = ChargingOutcome::NotCharged { best_time: times[best_i], best_infidelity: best_val };

    let (_, delta_h) = orbit.energy_moments();
    if delta_h <= R::tol_floor() * orbit.energy_moments().0.abs().max(R::one()) {
        return Ok(not_charged);
    }
    let half_pi = R::FRAC_PI_2();
    let mt_band = (delta_h * dt * R::lit(0.5) * R::lit(1.01)).min(half_pi).sin().powi(2);
    let capture = (R::lit(0.5) * opts.eps_c.sqrt()).max(mt_band);

    for i in 1..g {
        let v = infid[i];
        let left_ok = v <= infid[i - 1];
        let right_ok = i == g - 1 || v <= infid[i + 1];
        if !(v <= capture && left_ok && right_ok) {
            continue;
        }
        let lo = times[i - 1];
        let hi = if i == g - 1 { t_max } else { times[i + 1] };
        let t_star = refine_maximum(&trace, lo, hi, times[i], opts.rel_time_tol);
        let inf_star = trace.infidelity(t_star).max(R::zero());
        if t_star > R::zero() && inf_star <= opts.eps_c {
            let a = trace.amplitude(t_star);
            return Ok(ChargingOutcome::Charged(ChargingEvent {
                t_charge: t_star,
                phase: a.im.atan2(a.re),
                infidelity_at_t: inf_star,
            }));
        }
    }
    Ok(not_charged)
}

/// Locates the fidelity maximum in `[lo, hi]` around grid point `mid`.
fn refine_maximum<R: Real>(trace: &OverlapTrace<R>, lo: R, hi: R, mid: R, rel_tol: R) -> R {
    let zero = R::zero();
    // Prefer the half-bracket on which dF/dt changes sign from + to −.
    let d_mid = trace.fidelity_rate(mid);
    let (mut a, mut b) = if d_mid > zero { (mid, hi) } else { (lo, mid) };
    let (da, db) = (trace.fidelity_rate(a), trace.fidelity_rate(b));
    if da >= zero && db <= zero && a < b {
        for _ in 0..200 {
            let m = (a + b) * R::lit(0.5);
            if m <= a || m >= b {
                break;
            }
            if trace.fidelity_rate(m) > zero {
                a = m;
            } else {
                b = m;
            }
        }
        return (a + b) * R::lit(0.5);
    }
    // No sign change (maximum at the scan boundary): golden-section on infidelity.
    let phi = (R::lit(5.0).sqrt() - R::one()) * R::lit(0.5);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * phi;
    let mut d = a + (b - a) * phi;
    for _ in 0..200 {
        if b - a <= rel_tol * b.abs().max(R::min_positive_value()) {
            break;
        }
        if trace.infidelity(c) < trace.infidelity(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - (b - a) * phi;
        d = a + (b - a) * phi;
    }
    [lo, hi, (a + b) * R::lit(0.5)].into_iter().fold(mid, |best, t| {
        if trace.fidelity(t) > trace.fidelity(best) {
            t
        } else {
            best
        }
    })
}

/// Per-block Fubini–Study speeds on a uniform grid over `[0, t_end]`.
#[derive(Clone, Debug, Serialize)]
pub struct BlockSpeedProfile<R> {
    pub times: Vec<R>,
    /// `speeds[μ][i]`: speed of block `μ` at `times[i]`.
    pub speeds: Vec<Vec<R>>,
    /// Full-state speed `ΔH` at each time, from `H` directly.
    pub full_speed: Vec<R>,
}

impl<R: Real> BlockSpeedProfile<R> {
    /// `Σ_μ v_μ²(t_i)`.
    pub fn speed_squared_sums(&self) -> Vec<R> {
        (0..self.times.len()).map(|i| self.speeds.iter().map(|s| s[i] * s[i]).sum()).collect()
    }

    /// `∫ v_μ dt` per block.
    pub fn block_path_lengths(&self) -> Vec<R> {
        let step = self.times[1] - self.times[0];
        self.speeds.iter().map(|s| simpson(s, step)).collect()
    }

    /// Largest `|Σv_μ² − v²| / v²` over the grid.
    pub fn additivity_defect(&self) -> R {
        self.speed_squared_sums()
            .iter()
            .zip(&self.full_speed)
            .map(|(&s, &v)| (s - v * v).abs() / (v * v).max(R::min_positive_value()))
            .fold(R::zero(), R::max)
    }
}

/// Fubini–Study speed of each block of a product trajectory.
///
/// Block states are extracted at `t ± δ` and the speed is the ray distance
/// `2 asin(c/2)/(2δ)`, with `c` the phase-aligned chord, so the result does
/// not depend on the phase convention of the extracted states. Fails with
/// the offending time if a sample is not product across `partition`.
pub fn block_speeds<R: Real>(
    orbit: &Orbit<'_, R>,
    partition: &BlockPartition,
    t_end: R,
    samples: usize,
    delta: R,
    eps_p: R,
) -> Result<BlockSpeedProfile<R>> {
    let n = partition.n();
    if orbit.propagator().dim() != 1usize << n {
        return Err(Error::Dimension("partition does not match the register size".into()));
    }
    if !(delta > R::zero()) || !(t_end > R::zero()) {
        return Err(Error::InvalidArgument("block speeds need positive T and step".into()));
    }
    let pts = simpson_points(samples);
    let step = t_end / R::lit((pts - 1) as f64);
    let times: Vec<R> = (0..pts).map(|i| step * R::lit(i as f64)).collect();
    let h = orbit.propagator().hamiltonian();
    let mut speeds = vec![Vec::with_capacity(pts); partition.num_blocks()];
    let mut full_speed = Vec::with_capacity(pts);
    let two = R::lit(2.0);
    for &t in &times {
        let before = orbit.at(t - delta);
        let after = orbit.at(t + delta);
        full_speed.push(fs_speed(h, &orbit.at(t))?);
        for (mu, block) in partition.blocks().iter().enumerate() {
            let a = extract_block_state(&before, block, n, eps_p).map_err(|e| at_time(e, t - delta))?;
            let b = extract_block_state(&after, block, n, eps_p).map_err(|e| at_time(e, t + delta))?;
            let chord = a.ray_chord(&b).min(two);
            speeds[mu].push(two * (chord / two).asin() / (two * delta));
        }
    }
    Ok(BlockSpeedProfile { times, speeds, full_speed })
}

fn at_time<R: Real>(e: Error, t: R) -> Error {
    match e {
        Error::NotProduct { block, purity, .. } => Error::NotProduct { time: t.to_f64_lossy(), block, purity },
        other => other,
    }
}

/// One row of a trajectory dump.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrajectorySample<R> {
    pub t: R,
    pub fidelity_to_target: R,
    pub fs_speed: R,
    pub energy: R,
}

/// Samples fidelity, speed and battery energy on a uniform grid over `[0, t_end]`.
pub fn sample_trajectory<R: Real>(
    orbit: &Orbit<'_, R>,
    target: &ComplexVector<R>,
    battery: &BatterySpec<R>,
    t_end: R,
    samples: usize,
) -> Result<Vec<TrajectorySample<R>>> {
    let samples = samples.max(2);
    let h = orbit.propagator().hamiltonian();
    let step = t_end / R::lit((samples - 1) as f64);
    (0..samples)
        .map(|i| {
            let t = step * R::lit(i as f64);
            let psi = orbit.at(t);
            Ok(TrajectorySample {
                t,
                fidelity_to_target: target.fidelity(&psi),
                fs_speed: fs_speed(h, &psi)?,
                energy: battery.energy(&psi),
            })
        })
        .collect()
}
