//! Independent computations of the ruin probability used to validate the
//! closed-form evaluation: exact distribution evolution, Monte Carlo, and
//! the finite-threshold linear system.

mod dp;
mod finite_w;
mod mc;
mod report;

pub use dp::{dp_ruin, dp_ruin_with, dp_step, DpOptions, DpOutcome, WealthDistribution};
pub use finite_w::{finite_w_profile, finite_w_ruin};
pub use mc::{mc_ruin, McEstimate, McOptions};
pub use report::{
    cross_check, cross_check_with, default_thresholds, DpSummary, FiniteWPoint, OracleOptions,
    OracleReport, Verdicts, ORACLE_TOL,
};
