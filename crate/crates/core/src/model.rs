//! Battery, endpoint states, block partitions and cluster-flip Hamiltonians.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::config::MAX_DENSE_QUBITS;
use crate::error::{Error, Result};
use crate::numkit::qubits::{qubit_mask, subsystem_offsets};
use crate::numkit::{ComplexMatrix, ComplexVector, Real};

pub(crate) fn check_dense(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("qubit count must be at least 1".into()));
    }
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge { n, max: MAX_DENSE_QUBITS });
    }
    Ok(())
}

/// `H_B = (ω/2) Σ_j (1 + σ_j^z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatterySpec<R> {
    pub n: usize,
    pub omega: R,
}

impl<R: Real> BatterySpec<R> {
    pub fn new(n: usize, omega: R) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("battery needs at least one cell".into()));
        }
        if !(omega.is_finite() && omega > R::zero()) {
            return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
        }
        Ok(Self { n, omega })
    }

    /// Energy of a computational basis state: `ω ·` (number of up spins).
    pub fn basis_energy(&self, index: usize) -> R {
        self.omega * R::lit(index.count_ones() as f64)
    }

    /// `⟨ψ|H_B|ψ⟩` without building the matrix.
    pub fn energy(&self, psi: &ComplexVector<R>) -> R {
        psi.as_slice().iter().enumerate().map(|(i, z)| z.norm_sqr() * self.basis_energy(i)).sum()
    }
}

/// Diagonal battery Hamiltonian.
pub fn battery_hamiltonian<R: Real>(spec: &BatterySpec<R>) -> Result<ComplexMatrix<R>> {
    check_dense(spec.n)?;
    let diag: Vec<R> = (0..1usize << spec.n).map(|i| spec.basis_energy(i)).collect();
    Ok(ComplexMatrix::from_real_diagonal(&diag))
}

/// `(|↓⟩^{⊗n}, |↑⟩^{⊗n})`: basis indices `0` and `2^n − 1`.
pub fn endpoint_states<R: Real>(n: usize) -> Result<(ComplexVector<R>, ComplexVector<R>)> {
    check_dense(n)?;
    let dim = 1usize << n;
    Ok((ComplexVector::basis(dim, 0), ComplexVector::basis(dim, dim - 1)))
}

/// Disjoint blocks covering qubits `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl BlockPartition {
    /// Validates disjointness, coverage and nonempty blocks. Each block is sorted; block order is kept.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartition("empty register".into()));
        }
        let mut seen = vec![false; n];
        let mut blocks = blocks;
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            b.sort_unstable();
            for &q in b.iter() {
                if q >= n {
                    return Err(Error::InvalidPartition(format!("qubit {q} out of range for {n} qubits")));
                }
                if seen[q] {
                    return Err(Error::InvalidPartition(format!("qubit {q} appears in more than one block")));
                }
                seen[q] = true;
            }
        }
        if let Some(q) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("qubit {q} is not covered")));
        }
        Ok(Self { n, blocks })
    }

    /// `m` contiguous blocks with sizes in `{⌊n/m⌋, ⌈n/m⌉}`, larger blocks first.
    pub fn balanced(n: usize, m: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidArgument(format!("block count {m} must lie in 1..={n}")));
        }
        let base = n / m;
        let extra = n % m;
        let mut blocks = Vec::with_capacity(m);
        let mut next = 0;
        for mu in 0..m {
            let size = base + usize::from(mu < extra);
            blocks.push((next..next + size).collect());
            next += size;
        }
        Self::new(n, blocks)
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Self::balanced(n, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn masks(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| qubit_mask(b, self.n)).collect()
    }

    /// Canonical form: blocks ordered by their smallest qubit.
    pub fn canonical(&self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.sort_unstable_by_key(|b| b[0]);
        Self { n: self.n, blocks }
    }

    /// Merges blocks `i` and `j` (`i != j`).
    pub fn merge(&self, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= self.blocks.len() || j >= self.blocks.len() {
            return Err(Error::InvalidArgument(format!("cannot merge blocks {i} and {j}")));
        }
        let mut blocks = Vec::with_capacity(self.blocks.len() - 1);
        let mut merged = self.blocks[i].clone();
        merged.extend_from_slice(&self.blocks[j]);
        for (k, b) in self.blocks.iter().enumerate() {
            if k == i {
                blocks.push(merged.clone());
            } else if k != j {
                blocks.push(b.clone());
            }
        }
        Self::new(self.n, blocks)
    }
}

/// `H_m = g Σ_μ X_μ` with `g = π/(2T)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterFlipSpec<R> {
    pub partition: BlockPartition,
    pub g: R,
    pub t_charge: R,
}

impl<R: Real> ClusterFlipSpec<R> {
    pub fn new(partition: BlockPartition, g: R, t_charge: R) -> Result<Self> {
        if !(g.is_finite() && g > R::zero() && t_charge.is_finite() && t_charge > R::zero()) {
            return Err(Error::InvalidArgument("coupling and charging time must be positive".into()));
        }
        let quarter = R::FRAC_PI_2();
        if (g * t_charge - quarter).abs() > R::tol(1e-12) * quarter {
            return Err(Error::InvalidArgument(format!("g·T = {} differs from π/2", g * t_charge)));
        }
        Ok(Self { partition, g, t_charge })
    }

    pub fn from_charging_time(partition: BlockPartition, t_charge: R) -> Result<Self> {
        Self::new(partition, R::FRAC_PI_2() / t_charge, t_charge)
    }

    pub fn from_coupling(partition: BlockPartition, g: R) -> Result<Self> {
        Self::new(partition, g, R::FRAC_PI_2() / g)
    }
}

/// Lifts an operator on the qubits of `block` (first listed qubit most significant)
/// to the full register, acting as identity elsewhere.
pub fn embed_block_operator<R: Real>(op: &ComplexMatrix<R>, block: &[usize], n: usize) -> Result<ComplexMatrix<R>> {
    check_dense(n)?;
    let local_dim = 1usize << block.len();
    if op.rows() != local_dim || op.cols() != local_dim {
        return Err(Error::Dimension(format!(
            "block operator is {}x{}, block of {} qubits needs {local_dim}",
            op.rows(),
            op.cols(),
            block.len()
        )));
    }
    let offsets = subsystem_offsets(block, n);
    let mask = qubit_mask(block, n);
    let dim = 1usize << n;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for r in (0..dim).filter(|r| r & mask == 0) {
        for (a, &oa) in offsets.iter().enumerate() {
            for (b, &ob) in offsets.iter().enumerate() {
                let z = op[(a, b)];
                if z.re != R::zero() || z.im != R::zero() {
                    h[(r | oa, r | ob)] += z;
                }
            }
        }
    }
    Ok(h)
}

/// `X = |U⟩⟨D| + |D⟩⟨U|` on `s` qubits, zero on the orthogonal complement.
pub fn block_flip_local<R: Real>(s: usize) -> ComplexMatrix<R> {
    let d = 1usize << s;
    let mut x = ComplexMatrix::zeros(d, d);
    x[(0, d - 1)] = Complex::new(R::one(), R::zero());
    x[(d - 1, 0)] = Complex::new(R::one(), R::zero());
    x
}

/// `Σ_μ g_μ X_μ` with one coupling per block.
pub fn block_flip_hamiltonian<R: Real>(partition: &BlockPartition, couplings: &[R]) -> Result<ComplexMatrix<R>> {
    let n = partition.n();
    check_dense(n)?;
    if couplings.len() != partition.num_blocks() {
        return Err(Error::InvalidArgument(format!(
            "{} couplings for {} blocks",
            couplings.len(),
            partition.num_blocks()
        )));
    }
    let dim = 1usize << n;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for (mask, &g) in partition.masks().iter().zip(couplings) {
        for i in 0..dim {
            let bits = i & mask;
            if bits == 0 || bits == *mask {
                h[(i ^ mask, i)] += Complex::new(g, R::zero());
            }
        }
    }
    Ok(h)
}

/// Cluster-flip Hamiltonian `H_m = g Σ_μ X_μ`.
pub fn cluster_flip_hamiltonian<R: Real>(spec: &ClusterFlipSpec<R>) -> Result<ComplexMatrix<R>> {
    block_flip_hamiltonian(&spec.partition, &vec![spec.g; spec.partition.num_blocks()])
}

/// `H ⊕ diag(extra_levels)` and `ψ₀ ⊕ 0`.
pub fn embed_with_spectator<R: Real>(
    h: &ComplexMatrix<R>,
    psi0: &ComplexVector<R>,
    extra_levels: &[R],
) -> Result<(ComplexMatrix<R>, ComplexVector<R>)> {
    if h.rows() != psi0.dim() || !h.is_square() {
        return Err(Error::Dimension("Hamiltonian and state dimensions differ".into()));
    }
    if extra_levels.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("spectator levels".into()));
    }
    if extra_levels.is_empty() {
        return Ok((h.clone(), psi0.clone()));
    }
    let h_ext = h.direct_sum(&ComplexMatrix::from_real_diagonal(extra_levels));
    let mut amps = psi0.as_slice().to_vec();
    amps.extend(std::iter::repeat_n(Complex::new(R::zero(), R::zero()), extra_levels.len()));
    Ok((h_ext, ComplexVector::new(amps)?))
}
