//! The speed–depth frontier: closed-form staircase, certificates and the
//! numerical checks that the frontier is both valid and attained.

pub mod fleet;
mod formulas;
pub mod random;
mod report;
pub mod saturation;
pub mod suite;

pub use fleet::{randomized_product_fleet, FleetOptions, FleetReport, FleetTrial};
pub use formulas::*;
pub use report::{all_passed, Check};
pub use saturation::{verify_saturation, SaturationReport};
pub use suite::{run_verification, SectionSummary, VerificationSummary, VerifyConfig};
