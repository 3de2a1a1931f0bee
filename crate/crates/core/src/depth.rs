//! Entanglement depth of pure states and along charging trajectories.

use itertools::Itertools;
use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{DEPTH_SAMPLES, NORM_TOL, PURITY_EPS};
use crate::dynamics::Orbit;
use crate::error::{Error, Result};
use crate::model::{check_dense, BlockPartition};
use crate::numkit::qubits::{qubit_mask, subsystem_purity_mask};
use crate::numkit::{hermitian_eigendecomposition, partial_trace, ComplexVector, Real};

fn check_state<R: Real>(psi: &ComplexVector<R>, n: usize) -> Result<()> {
    check_dense(n)?;
    if psi.dim() != 1usize << n {
        return Err(Error::Dimension(format!("state of dimension {} is not a {n}-qubit state", psi.dim())));
    }
    if (psi.norm() - R::one()).abs() > R::tol(NORM_TOL) {
        return Err(Error::NotNormalized(psi.norm().to_f64_lossy()));
    }
    Ok(())
}

/// Per-block purities and the verdict `all ≥ 1 − eps_p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductCheck<R> {
    pub product: bool,
    pub purities: Vec<R>,
}

pub fn is_product_across<R: Real>(
    psi: &ComplexVector<R>,
    partition: &BlockPartition,
    eps_p: R,
) -> Result<ProductCheck<R>> {
    let n = partition.n();
    check_state(psi, n)?;
    let threshold = R::one() - eps_p;
    let purities: Vec<R> = partition.masks().iter().map(|&m| subsystem_purity_mask(psi.as_slice(), m, n)).collect();
    Ok(ProductCheck { product: purities.iter().all(|&p| p >= threshold), purities })
}

/// Finest product partition of a pure state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Factorization<R> {
    pub partition: BlockPartition,
    pub depth: usize,
    pub purities: Vec<R>,
}

/// Greedy minimal-factor extraction.
///
/// For the lowest unassigned qubit `q`, subsets of the unassigned qubits
/// containing `q` are tried by increasing size, then lexicographically; the
/// first with reduced purity `≥ 1 − eps_p` becomes a block. For a pure state
/// this is the factor containing `q`, so the result is the unique finest
/// product partition.
pub fn finest_factorization<R: Real>(psi: &ComplexVector<R>, n: usize, eps_p: R) -> Result<Factorization<R>> {
    check_state(psi, n)?;
    let amps = psi.as_slice();
    let threshold = R::one() - eps_p;
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut blocks = Vec::new();
    let mut purities = Vec::new();
    while let Some(&anchor) = remaining.first() {
        let others = &remaining[1..];
        let mut found = None;
        'sizes: for extra in 0..=others.len() {
            for combo in others.iter().copied().combinations(extra) {
                let mut block = Vec::with_capacity(extra + 1);
                block.push(anchor);
                block.extend(combo);
                let p = subsystem_purity_mask(amps, qubit_mask(&block, n), n);
                // The full remainder is always a union of factors.
                if p >= threshold || block.len() == remaining.len() {
                    found = Some((block, p));
                    break 'sizes;
                }
            }
        }
        let (block, p) = found.expect("remainder block always qualifies");
        remaining.retain(|q| !block.contains(q));
        blocks.push(block);
        purities.push(p);
    }
    let partition = BlockPartition::new(n, blocks)?;
    let depth = partition.max_block_size();
    Ok(Factorization { partition, depth, purities })
}

/// Pure state of `block`, recovered as the dominant eigenvector of its
/// reduced density matrix with the largest-magnitude amplitude made real positive.
pub fn extract_block_state<R: Real>(
    psi: &ComplexVector<R>,
    block: &[usize],
    n: usize,
    eps_p: R,
) -> Result<ComplexVector<R>> {
    check_state(psi, n)?;
    let rho = partial_trace(psi, block, n)?;
    let purity = crate::numkit::purity(&rho);
    if purity < R::one() - eps_p {
        let mut b = block.to_vec();
        b.sort_unstable();
        return Err(Error::NotProduct { time: f64::NAN, block: b, purity: purity.to_f64_lossy() });
    }
    let eig = hermitian_eigendecomposition(&rho)?;
    let top = eig.dim() - 1;
    let v = eig.vectors.column(top);
    let lead = v.as_slice().iter().copied().fold(Complex::new(R::zero(), R::zero()), |best, z| {
        if z.norm() > best.norm() {
            z
        } else {
            best
        }
    });
    let phase = lead.conj() / Complex::new(lead.norm(), R::zero());
    let fixed = v.scaled(phase);
    Ok(fixed.normalized().unwrap_or(fixed))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepthOptions<R> {
    pub samples: usize,
    pub eps_p: R,
    /// Local bisection around the sampled maximum.
    pub refine: bool,
}

impl<R: Real> Default for DepthOptions<R> {
    fn default() -> Self {
        Self { samples: DEPTH_SAMPLES, eps_p: R::lit(PURITY_EPS), refine: false }
    }
}

/// Sampled entanglement depth along `[0, T]`.
///
/// `ent_u` is the maximum over the samples, a lower bound on the supremum over
/// the continuous interval.
#[derive(Clone, Debug, Serialize)]
pub struct DepthProfile<R> {
    pub times: Vec<R>,
    pub depths: Vec<usize>,
    pub partitions: Vec<Vec<Vec<usize>>>,
    pub ent_u: usize,
    pub witness_time: R,
}

impl<R: Real> DepthProfile<R> {
    pub fn endpoint_depths(&self) -> (usize, usize) {
        (self.depths[0], *self.depths.last().expect("nonempty profile"))
    }
}

pub fn trajectory_depth<R: Real>(
    orbit: &Orbit<'_, R>,
    n: usize,
    t_end: R,
    opts: &DepthOptions<R>,
) -> Result<DepthProfile<R>> {
    if opts.samples < 3 {
        return Err(Error::InvalidArgument("depth profile needs at least 3 samples".into()));
    }
    if !(t_end > R::zero()) {
        return Err(Error::InvalidArgument("depth profile needs T > 0".into()));
    }
    let step = t_end / R::lit((opts.samples - 1) as f64);
    let mut times: Vec<R> = (0..opts.samples).map(|i| step * R::lit(i as f64)).collect();
    *times.last_mut().expect("nonempty") = t_end;
    let factor_at = |t: R| -> Result<Factorization<R>> {
        let psi = orbit.at(t);
        let psi = psi.normalized().unwrap_or(psi);
        finest_factorization(&psi, n, opts.eps_p)
    };
    let facts = times.par_iter().map(|&t| factor_at(t)).collect::<Result<Vec<_>>>()?;
    let mut depths: Vec<usize> = facts.iter().map(|f| f.depth).collect();
    let mut partitions: Vec<Vec<Vec<usize>>> = facts.iter().map(|f| f.partition.blocks().to_vec()).collect();

    if opts.refine {
        let (imax, _) = depths.iter().enumerate().max_by_key(|(i, d)| (**d, std::cmp::Reverse(*i))).expect("nonempty");
        let mut extra = Vec::new();
        for &nb in &[imax.saturating_sub(1), (imax + 1).min(times.len() - 1)] {
            if nb == imax {
                continue;
            }
            let (mut a, b) = (times[imax], times[nb]);
            for _ in 0..3 {
                let mid = (a + b) * R::lit(0.5);
                extra.push((mid, factor_at(mid)?));
                a = mid;
            }
        }
        for (t, f) in extra {
            let pos = times.partition_point(|&x| x < t);
            times.insert(pos, t);
            depths.insert(pos, f.depth);
            partitions.insert(pos, f.partition.blocks().to_vec());
        }
    }

    let ent_u = *depths.iter().max().expect("nonempty");
    let witness = depths.iter().position(|&d| d == ent_u).expect("max exists");
    Ok(DepthProfile { witness_time: times[witness], times, depths, partitions, ent_u })
}

/// All set partitions of `0..n` as restricted growth strings
/// (`labels[i]` is the block of element `i`; `labels[0] = 0`, each label at
/// most one more than the running maximum).
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(labels: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if labels.len() == n {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max + 1 {
            labels.push(l);
            rec(labels, max.max(l), n, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut labels = vec![0];
    rec(&mut labels, 0, n, &mut out);
    out
}

/// Exhaustive depth: minimum over all product partitions of the largest block.
pub fn exhaustive_min_depth<R: Real>(psi: &ComplexVector<R>, n: usize, eps_p: R) -> Result<(usize, BlockPartition)> {
    check_state(psi, n)?;
    let mut best: Option<(usize, BlockPartition)> = None;
    for labels in set_partitions(n) {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (q, &l) in labels.iter().enumerate() {
            blocks[l].push(q);
        }
        let p = BlockPartition::new(n, blocks)?;
        let size = p.max_block_size();
        if best.as_ref().is_some_and(|(d, _)| *d <= size) {
            continue;
        }
        if is_product_across(psi, &p, eps_p)?.product {
            best = Some((size, p));
        }
    }
    Ok(best.expect("the single-block partition is always product"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Propagator;
    use crate::model::{cluster_flip_hamiltonian, endpoint_states, ClusterFlipSpec};

    fn ghz(n: usize) -> ComplexVector<f64> {
        let mut v = ComplexVector::zeros(1 << n);
        let s = 0.5f64.sqrt();
        v[0] = Complex::new(s, 0.0);
        v[(1 << n) - 1] = Complex::new(s, 0.0);
        v
    }

    #[test]
    fn all_down_is_fully_separable() {
        let (down, _) = endpoint_states::<f64>(5).unwrap();
        let f = finest_factorization(&down, 5, 1e-8).unwrap();
        assert_eq!(f.depth, 1);
        assert_eq!(f.partition.num_blocks(), 5);
    }

    #[test]
    fn ghz_is_one_block() {
        for n in 2..=6 {
            let f = finest_factorization(&ghz(n), n, 1e-8).unwrap();
            assert_eq!(f.depth, n);
            assert_eq!(f.partition.blocks(), &[(0..n).collect::<Vec<_>>()]);
        }
    }

    #[test]
    fn cluster_flip_midpoint_has_two_pairs() {
        let spec = ClusterFlipSpec::from_charging_time(BlockPartition::balanced(4, 2).unwrap(), 1.0).unwrap();
        let h = cluster_flip_hamiltonian(&spec).unwrap();
        let (psi0, _) = endpoint_states::<f64>(4).unwrap();
        let prop = Propagator::new(&h).unwrap();
        let psi = prop.orbit(&psi0).unwrap().at(0.5);
        let f = finest_factorization(&psi, 4, 1e-8).unwrap();
        assert_eq!(f.depth, 2);
        assert_eq!(f.partition, spec.partition);
    }

    #[test]
    fn interleaved_factors_found() {
        // GHZ on qubits {0,2} times |↑⟩|↓⟩ on {1,3}
        let mut v = ComplexVector::<f64>::zeros(16);
        let s = 0.5f64.sqrt();
        v[0b0100] = Complex::new(s, 0.0);
        v[0b1110] = Complex::new(0.0, s);
        let f = finest_factorization(&v, 4, 1e-8).unwrap();
        assert_eq!(f.partition.blocks(), &[vec![0, 2], vec![1], vec![3]]);
        assert_eq!(exhaustive_min_depth(&v, 4, 1e-8).unwrap().0, 2);
    }

    #[test]
    fn product_checks() {
        let g = ghz(2);
        let split = BlockPartition::balanced(2, 2).unwrap();
        let whole = BlockPartition::balanced(2, 1).unwrap();
        let c = is_product_across(&g, &split, 1e-8).unwrap();
        assert!(!c.product);
        assert!(c.purities.iter().all(|p| (p - 0.5).abs() < 1e-15));
        assert!(is_product_across(&g, &whole, 1e-8).unwrap().product);
    }

    #[test]
    fn extraction() {
        // |↓⟩⊗|↑⟩
        let psi = ComplexVector::<f64>::basis(4, 1);
        let b = extract_block_state(&psi, &[1], 2, 1e-8).unwrap();
        assert_eq!(b, ComplexVector::basis(2, 1));
        assert!(matches!(extract_block_state(&ghz(2), &[0], 2, 1e-8), Err(Error::NotProduct { .. })));
    }

    #[test]
    fn extraction_recovers_flip_block_up_to_phase() {
        let spec = ClusterFlipSpec::from_charging_time(BlockPartition::balanced(5, 2).unwrap(), 1.0).unwrap();
        let h = cluster_flip_hamiltonian(&spec).unwrap();
        let (psi0, _) = endpoint_states::<f64>(5).unwrap();
        let prop = Propagator::new(&h).unwrap();
        let t = 0.37;
        let psi = prop.orbit(&psi0).unwrap().at(t);
        let b = extract_block_state(&psi, &[3, 4], 5, 1e-8).unwrap();
        let mut expect = ComplexVector::zeros(4);
        expect[0] = Complex::new((spec.g * t).cos(), 0.0);
        expect[3] = Complex::new(0.0, -(spec.g * t).sin());
        assert!(b.ray_chord(&expect) < 1e-12);
    }

    #[test]
    fn set_partition_counts_are_bell_numbers() {
        let bell = [1, 2, 5, 15, 52, 203];
        for (n, &b) in (1..=6).zip(&bell) {
            assert_eq!(set_partitions(n).len(), b);
        }
    }

    #[test]
    fn unnormalized_state_rejected() {
        let v = ComplexVector::<f64>::from_real(&[1.0, 1.0]);
        assert!(matches!(finest_factorization(&v, 1, 1e-8), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn cluster_flip_trajectory_depth() {
        for (n, m) in [(4, 2), (5, 2), (6, 6), (5, 1)] {
            let spec = ClusterFlipSpec::from_charging_time(BlockPartition::balanced(n, m).unwrap(), 1.0).unwrap();
            let h = cluster_flip_hamiltonian(&spec).unwrap();
            let (psi0, _) = endpoint_states::<f64>(n).unwrap();
            let prop = Propagator::new(&h).unwrap();
            let orbit = prop.orbit(&psi0).unwrap();
            let prof = trajectory_depth(&orbit, n, 1.0, &DepthOptions::default()).unwrap();
            assert_eq!(prof.ent_u, n.div_ceil(m), "n={n} m={m}");
            assert_eq!(prof.endpoint_depths(), (1, 1));
            assert_eq!(prof.times.len(), 201);
            let refined =
                trajectory_depth(&orbit, n, 1.0, &DepthOptions { refine: true, ..DepthOptions::default() }).unwrap();
            assert_eq!(refined.ent_u, prof.ent_u);
            assert!(refined.times.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
