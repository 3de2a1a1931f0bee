//! Random test instances: Haar qubit rotations, Hermitian matrices, block-GHZ states.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::model::BlockPartition;
use crate::numkit::qubits::subsystem_offsets;
use crate::numkit::{ComplexMatrix, ComplexVector};

fn gaussian<G: Rng + ?Sized>(rng: &mut G) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-random element of U(2), row-major.
pub fn haar_qubit_unitary<G: Rng + ?Sized>(rng: &mut G) -> [[Complex<f64>; 2]; 2] {
    let mut v = [0.0; 4];
    for x in &mut v {
        *x = gaussian(rng);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = Complex::new(v[0] / norm, v[1] / norm);
    let b = Complex::new(v[2] / norm, v[3] / norm);
    let phase = Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    [[a * phase, -b.conj() * phase], [b * phase, a.conj() * phase]]
}

/// Gaussian Hermitian matrix with entry scale `scale`.
pub fn random_hermitian<G: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut G) -> ComplexMatrix<f64> {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = Complex::new(scale * gaussian(rng), 0.0);
        for j in (i + 1)..dim {
            let z = Complex::new(gaussian(rng), gaussian(rng)) * (scale * std::f64::consts::FRAC_1_SQRT_2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn random_state<G: Rng + ?Sized>(dim: usize, rng: &mut G) -> ComplexVector<f64> {
    let v = ComplexVector::from_vec_unchecked((0..dim).map(|_| Complex::new(gaussian(rng), gaussian(rng))).collect());
    v.normalized().expect("gaussian vector is nonzero")
}

/// Random (non-uniform) set partition of `0..n`.
pub fn random_partition<G: Rng + ?Sized>(n: usize, rng: &mut G) -> Result<BlockPartition> {
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for (q, &l) in labels.iter().enumerate() {
        if slot[l] == usize::MAX {
            slot[l] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[l]].push(q);
    }
    BlockPartition::new(n, blocks)
}

/// Product over a random partition of GHZ blocks, each qubit then rotated by
/// an independent Haar-random unitary. Returns the state and the partition.
pub fn random_block_ghz_state<G: Rng + ?Sized>(n: usize, rng: &mut G) -> Result<(ComplexVector<f64>, BlockPartition)> {
    let partition = random_partition(n, rng)?;
    let mut psi = vec![Complex::new(1.0, 0.0); 1 << n];
    for block in partition.blocks() {
        let s = block.len();
        let d = 1usize << s;
        let mut local = vec![Complex::new(0.0, 0.0); d];
        local[0] = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        local[d - 1] += Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for pos in 0..s {
            let u = haar_qubit_unitary(rng);
            let bit = 1usize << (s - 1 - pos);
            for idx in (0..d).filter(|i| i & bit == 0) {
                let (x0, x1) = (local[idx], local[idx | bit]);
                local[idx] = u[0][0] * x0 + u[0][1] * x1;
                local[idx | bit] = u[1][0] * x0 + u[1][1] * x1;
            }
        }
        let offsets = subsystem_offsets(block, n);
        let mask: usize = offsets[d - 1];
        for (i, amp) in psi.iter_mut().enumerate() {
            let local_index = offsets.iter().position(|&o| o == i & mask).expect("offset table covers mask");
            *amp *= local[local_index];
        }
    }
    let v = ComplexVector::from_vec_unchecked(psi);
    Ok((v.normalized().expect("nonzero"), partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let u = haar_qubit_unitary(&mut rng);
            for i in 0..2 {
                for j in 0..2 {
                    let dot = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - Complex::new(expect, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn block_ghz_state_is_product_across_its_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            let (psi, p) = random_block_ghz_state(n, &mut rng).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let check = crate::depth::is_product_across(&psi, &p, 1e-8).unwrap();
            assert!(check.product, "n={n}");
        }
    }
}
