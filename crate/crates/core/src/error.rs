use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field B0·ρⁿ is singular at ρ = 0 for n = {n}")]
    SingularField { n: f64 },

    #[error("power-law approximation invalid: probe radius {r_probe} must be at least {min_ratio}·r0 (r0 = {r0})")]
    ApproximationInvalid { r_probe: f64, r0: f64, min_ratio: f64 },

    #[error("eigenvalues did not converge after {refinements} grid refinements (worst relative change {worst:e})")]
    NoConvergence { refinements: usize, worst: f64 },

    #[error("turning point not bracketed: domain grew to x_max = {x_max:e} λe without meeting the tail criterion")]
    DomainOverflow { x_max: f64 },

    #[error("levels {lower} and {upper} are numerically degenerate (α = {alpha:e})")]
    Degenerate { lower: usize, upper: usize, alpha: f64 },

    #[error("level index {index} out of range (solution holds {levels} levels)")]
    IndexOutOfRange { index: usize, levels: usize },

    #[error("equal energies give an infinite orthogonalisation time")]
    InfiniteTime,

    #[error("insufficient samples for the ansatz fit: {0}")]
    InsufficientSamples(String),

    #[error("spin-down ground state has exact energy ε = 1; the high-field form does not apply")]
    UseExactValue,

    #[error("eigen-solution is not converged")]
    Unconverged,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::DomainOverflow { .. }
                | Error::Degenerate { .. }
                | Error::Unconverged
                | Error::InfiniteTime
        )
    }
}
