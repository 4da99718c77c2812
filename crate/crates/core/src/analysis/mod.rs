//! Convergence studies and empirical probes of the scheme's stability and
//! consistency estimates.

mod compare;
mod ladder;
mod order;
mod probes;

pub use compare::{compare_to_reference, ErrorRecord, NormSet, Target};
pub use ladder::{build_ladder, run_ladder, ConvergenceReport, Field, LadderLevel, LevelRun};
pub use order::{estimate_order, OrderEstimate};
pub use probes::{
    discrete_lipschitz, fixed_point_check, lipschitz_probe, pair_distance, stability_probe,
    stability_table, supnorm_probe, weak_consistency_residual, weak_residuals, FixedPointReport,
    ModulusRow, StabilityReport, SupnormReport, TestFunction,
};
