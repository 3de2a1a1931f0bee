//! Dense complex linear algebra.

mod eigen;
mod matrix;
mod orthogonal;
pub mod qubits;
mod scalar;
mod vector;

pub use eigen::{hermitian_eigendecomposition, HermitianEigen};
pub use matrix::ComplexMatrix;
pub use orthogonal::{gram_schmidt_extend, OrthonormalSet};
pub use qubits::{partial_trace, purity, subsystem_purity};
pub use scalar::Real;
pub use vector::ComplexVector;

pub use num_complex::Complex;
