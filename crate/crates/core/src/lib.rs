//! Speed–depth frontier for complete charging of qubit quantum batteries.
//!
//! A charging protocol that drives `|↓…↓⟩` to `|↑…↑⟩` in time `T` at rate
//! `η = τ_QSL/T` can run on at most `⌊η⁻²⌋` independently orthogonalizing
//! blocks, which certifies an entanglement depth of `⌈N/⌊η⁻²⌋⌉` somewhere
//! along the trajectory. The cluster-flip Hamiltonians attain this bound.
//!
//! The numerical core is generic over [`numkit::Real`] (`f32`, `f64`); the
//! aliases below fix `f64`. Exact certificates for rational `η²` live in
//! [`frontier::certified_depth_exact`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod depth;
pub mod dynamics;
mod error;
pub mod frontier;
pub mod io;
pub mod model;
pub mod numkit;
pub mod qsl;
pub mod simulation;

pub use error::{Error, Result};

pub type Ket = numkit::ComplexVector<f64>;
pub type Operator = numkit::ComplexMatrix<f64>;
pub type Ket32 = numkit::ComplexVector<f32>;
pub type Operator32 = numkit::ComplexMatrix<f32>;
pub type Eigen = numkit::HermitianEigen<f64>;
pub type Certificate = frontier::Certificate<f64>;
pub type QslReport = qsl::QslReport<f64>;
pub type DepthProfile = depth::DepthProfile<f64>;
pub type SimulationReport = simulation::SimulationReport<f64>;
pub type ChargingOutcome = dynamics::ChargingOutcome<f64>;
