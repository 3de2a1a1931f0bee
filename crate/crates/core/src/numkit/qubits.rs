//! Qubit-register indexing and reduced density matrices.
//!
//! Qubits are numbered `0..n`; qubit `0` is the most significant bit of the
//! computational-basis index. Bit value `0` is `|↓⟩`, bit value `1` is `|↑⟩`.

use num_complex::Complex;

use super::{ComplexMatrix, ComplexVector, Real};
use crate::error::{Error, Result};

/// Bit mask of qubit `q` in an `n`-qubit basis index.
pub fn qubit_bit(q: usize, n: usize) -> usize {
    1 << (n - 1 - q)
}

/// Bit mask covering every qubit in `qubits`.
pub fn qubit_mask(qubits: &[usize], n: usize) -> usize {
    qubits.iter().fold(0, |m, &q| m | qubit_bit(q, n))
}

/// Full-register offsets of every local index on `qubits` (first listed qubit most significant).
pub fn subsystem_offsets(qubits: &[usize], n: usize) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|local| {
            qubits
                .iter()
                .enumerate()
                .filter(|(pos, _)| local & (1 << (k - 1 - pos)) != 0)
                .fold(0, |acc, (_, &q)| acc | qubit_bit(q, n))
        })
        .collect()
}

/// Checks `qubits` are distinct and `< n`, returning them sorted together with the complement.
pub fn split_register(qubits: &[usize], n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut seen = vec![false; n];
    for &q in qubits {
        if q >= n {
            return Err(Error::InvalidArgument(format!("qubit index {q} out of range for {n} qubits")));
        }
        if seen[q] {
            return Err(Error::InvalidArgument(format!("qubit index {q} listed twice")));
        }
        seen[q] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|&q| seen[q]).collect();
    let rest: Vec<usize> = (0..n).filter(|&q| !seen[q]).collect();
    Ok((keep, rest))
}

/// Number of qubits `n` with `dim = 2^n`.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn check_register<R: Real>(psi: &ComplexVector<R>, n: usize) -> Result<()> {
    if n >= usize::BITS as usize || psi.dim() != 1usize << n {
        return Err(Error::Dimension(format!("state of dimension {} is not a {n}-qubit state", psi.dim())));
    }
    Ok(())
}

/// Reduced density matrix `Tr_{rest} |ψ⟩⟨ψ|` on the qubits in `keep`.
pub fn partial_trace<R: Real>(psi: &ComplexVector<R>, keep: &[usize], n: usize) -> Result<ComplexMatrix<R>> {
    check_register(psi, n)?;
    let (keep, rest) = split_register(keep, n)?;
    let ka = subsystem_offsets(&keep, n);
    let kb = subsystem_offsets(&rest, n);
    let amp = psi.as_slice();
    let d = ka.len();
    let mut rho = ComplexMatrix::zeros(d, d);
    for a in 0..d {
        for a2 in a..d {
            let mut acc = Complex::new(R::zero(), R::zero());
            for &b in &kb {
                acc += amp[ka[a] + b] * amp[ka[a2] + b].conj();
            }
            rho[(a, a2)] = acc;
            rho[(a2, a)] = acc.conj();
        }
    }
    Ok(rho)
}

/// `Tr ρ_S²` for the reduction of `ψ` onto the qubits set in `mask`.
///
/// Evaluated through the Gram matrix of the smaller side of the cut, so the
/// cost is `2^n · 2^min(|S|, n−|S|)`.
pub fn subsystem_purity_mask<R: Real>(psi: &[Complex<R>], mask: usize, n: usize) -> R {
    let full = (1usize << n) - 1;
    let (small, large) =
        if (mask.count_ones() as usize) <= n / 2 { (mask, full & !mask) } else { (full & !mask, mask) };
    let small_q: Vec<usize> = (0..n).filter(|&q| small & qubit_bit(q, n) != 0).collect();
    let large_q: Vec<usize> = (0..n).filter(|&q| large & qubit_bit(q, n) != 0).collect();
    let sa = subsystem_offsets(&small_q, n);
    let lb = subsystem_offsets(&large_q, n);
    let width = lb.len();
    let mut m = Vec::with_capacity(sa.len() * width);
    for &a in &sa {
        m.extend(lb.iter().map(|&b| psi[a + b]));
    }
    let mut purity = R::zero();
    for (i, ri) in m.chunks_exact(width).enumerate() {
        purity += ri.iter().map(|z| z.norm_sqr()).sum::<R>().powi(2);
        for rj in m.chunks_exact(width).skip(i + 1) {
            let g = ri.iter().zip(rj).fold(Complex::new(R::zero(), R::zero()), |acc, (x, y)| acc + x.conj() * y);
            purity += g.norm_sqr() * R::lit(2.0);
        }
    }
    purity
}

/// Purity of the reduced state on `qubits`.
pub fn subsystem_purity<R: Real>(psi: &ComplexVector<R>, qubits: &[usize], n: usize) -> Result<R> {
    check_register(psi, n)?;
    let (keep, _) = split_register(qubits, n)?;
    Ok(subsystem_purity_mask(psi.as_slice(), qubit_mask(&keep, n), n))
}

/// `Tr ρ²`.
pub fn purity<R: Real>(rho: &ComplexMatrix<R>) -> R {
    rho.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::hermitian_eigendecomposition;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ghz2() -> ComplexVector<f64> {
        let s = 0.5f64.sqrt();
        ComplexVector::from_real(&[s, 0.0, 0.0, s])
    }

    fn random_state(n: usize, seed: u64) -> ComplexVector<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = ComplexVector::new(
            (0..1 << n).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        )
        .unwrap();
        v.normalized().unwrap()
    }

    #[test]
    fn product_state_reduces_to_factor() {
        // |↓⟩⊗|↑⟩ = basis index 0b01
        let psi = ComplexVector::<f64>::basis(4, 1);
        let rho0 = partial_trace(&psi, &[0], 2).unwrap();
        assert_eq!(rho0, ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
        let rho1 = partial_trace(&psi, &[1], 2).unwrap();
        assert_eq!(rho1, ComplexMatrix::from_real_diagonal(&[0.0, 1.0]));
    }

    #[test]
    fn ghz_marginal_is_maximally_mixed() {
        let rho = partial_trace(&ghz2(), &[0], 2).unwrap();
        assert!(rho.sub(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5])).max_abs() < 1e-15);
    }

    #[test]
    fn random_four_qubit_marginal_is_a_state() {
        let psi = random_state(4, 3);
        let rho = partial_trace(&psi, &[1, 2], 4).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12 && rho.trace().im.abs() < 1e-12);
        assert!(rho.is_hermitian(1e-12));
        let eig = hermitian_eigendecomposition(&rho).unwrap();
        assert!(eig.values[0] >= -1e-10);
        let p = purity(&rho);
        assert!((0.25 - 1e-12..=1.0 + 1e-10).contains(&p));
        let fast = subsystem_purity(&psi, &[2, 1], 4).unwrap();
        assert!((fast - p).abs() < 1e-13);
    }

    #[test]
    fn trace_over_everything_is_the_norm() {
        let psi = random_state(3, 5);
        let rho = partial_trace(&psi, &[], 3).unwrap();
        assert_eq!((rho.rows(), rho.cols()), (1, 1));
        assert!((rho[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn keep_out_of_range_rejected() {
        assert!(partial_trace(&ghz2(), &[2], 2).is_err());
        assert!(partial_trace(&ghz2(), &[0, 0], 2).is_err());
        assert!(partial_trace(&ghz2(), &[0], 3).is_err());
    }

    #[test]
    fn keep_order_does_not_matter() {
        let psi = random_state(3, 8);
        let a = partial_trace(&psi, &[0, 2], 3).unwrap();
        let b = partial_trace(&psi, &[2, 0], 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn purity_of_complementary_cuts_agree() {
        let psi = random_state(5, 13);
        let a = subsystem_purity(&psi, &[0, 3], 5).unwrap();
        let b = subsystem_purity(&psi, &[1, 2, 4], 5).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn msb_convention() {
        assert_eq!(qubit_bit(0, 3), 0b100);
        assert_eq!(qubit_bit(2, 3), 0b001);
        assert_eq!(subsystem_offsets(&[0, 2], 3), vec![0b000, 0b001, 0b100, 0b101]);
    }
}
