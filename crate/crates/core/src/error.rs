use thiserror::Error;

/// Everything that can go wrong while building a distribution, locating
/// roots, evaluating the ruin formula or running an oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability {value} at payoff {payoff}")]
    NegativeProbability { payoff: i64, value: f64 },

    #[error("probabilities sum to {sum}, expected 1 within 1e-12")]
    MassNotOne { sum: f64 },

    #[error("the lowest payoff carries no probability (need p(-nu) > 0)")]
    ZeroFloorMass,

    #[error("cannot truncate {family} with tail mass <= {tail_tol} within {budget} coefficients")]
    TailNotAchievable {
        family: &'static str,
        tail_tol: f64,
        budget: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree {requested} is below the minimum {minimum} for this distribution")]
    DegreeTooSmall { requested: usize, minimum: usize },

    #[error("p(z) has a pole at z = 0")]
    ZeroArgument,

    #[error("p(z) = 1 has no root in (0, 1); the game is not favorable")]
    NoInteriorRoot,

    #[error("found {found} roots of p(z) = 1 inside the unit disk, expected {expected}")]
    RootCountMismatch { found: usize, expected: usize },

    #[error("root {root} has residual |p(z) - 1| = {residual:e} above tolerance {tol:e}")]
    ResidualTooLarge {
        root: String,
        residual: f64,
        tol: f64,
    },

    #[error("root of modulus {modulus} exceeds the a-priori bound z* = {z_star}")]
    RootOutsideBound { modulus: f64, z_star: f64 },

    #[error("roots are not distinct (cluster within {cluster_tol:e}); use the Newton form")]
    RootsNotDistinct { cluster_tol: f64 },

    #[error("imaginary residue {residue:e} after summation exceeds 1e-6")]
    ImaginaryResidue { residue: f64 },

    #[error("complete symmetric polynomial magnitude {magnitude:e} exceeds overflow guard")]
    PhiOverflow { magnitude: f64 },

    #[error("computed probability {value} is outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },

    #[error("final-fortune distribution is undetermined for a non-favorable game")]
    FinalFortuneUndetermined,

    #[error("distribution evolution did not converge after {steps} steps (gap {gap:e})")]
    NotConverged { steps: usize, gap: f64 },

    #[error("finite-threshold oracle requires finite payoff support")]
    InfiniteSupport,

    #[error("singular linear system at row {row}")]
    SingularSystem { row: usize },
}

impl Error {
    /// Errors caused by malformed input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NegativeProbability { .. }
                | Error::MassNotOne { .. }
                | Error::ZeroFloorMass
                | Error::TailNotAchievable { .. }
                | Error::InvalidParameter(_)
                | Error::DegreeTooSmall { .. }
                | Error::ZeroArgument
                | Error::InfiniteSupport
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
