//! Truncated summation identities: the untwisted identity, the additively
//! twisted identity with Kloosterman sums, and the linear system that
//! recovers coefficients from a family of test functions.

mod family;
mod system;
mod twisted;
mod untwisted;

pub use family::{
    degree_group, family_transforms, group_by_degree, scatter_groups, AtomTransform, FamilySpec, TransformRequest,
    DEFAULT_FAMILY,
};
pub use system::{
    assemble_system, build_system, row_values, run_solve_experiment, solve_system, ExperimentConfig, LinearSystem,
    Mode, Solution, SolveReport,
};
pub use twisted::{
    calibrate_twist, twisted_lhs, twisted_rhs, CalibrationReport, CalibrationRow, CalibrationSetup, CalibrationVerdict,
    ConventionOutcome, SumConvention, TransformCache, TwistedRhs,
};
pub use untwisted::{untwisted_identity, IdentityReport};
