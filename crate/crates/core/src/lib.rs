//! Exact ruin probabilities for a gambler with integer-valued payoffs
//! playing against an infinitely rich adversary.
//!
//! The ruin probability from initial wealth `M` is a polynomial in the `nu`
//! roots of `p(z) = 1` inside the unit disk, where `p` is the payoff
//! generating function and `nu` the maximal loss. See [`ruin`] for the
//! evaluation and [`oracles`] for independent cross-checks.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod payoff;
mod poly;
pub mod rootfinder;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use payoff::{build_distribution, AnalyticFamily, PayoffDistribution};
pub use poly::winding_number;
pub use rootfinder::{find_disk_roots, find_z_star, DiskRootOptions, DiskRoots};
pub mod oracles;
pub mod ruin;

pub use ruin::{
    final_fortune_distribution, ruin_probability, ruin_probability_lagrange,
    ruin_probability_newton, ruin_probability_with, Method, RuinOptions, RuinResult, RuinSolver,
};
