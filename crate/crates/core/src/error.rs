//! Error type shared by the analytic and simulation modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Construction-time parameter validation failed.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive integrator exhausted its subdivision budget.
    #[error("quadrature did not converge: error estimate {error:.3e} with {segments} segments")]
    QuadratureNoConverge { error: f64, segments: usize },

    /// Root bracketing or iteration failed.
    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// An inverse lookup target exceeds the reachable range.
    #[error("target {target:.6e} outside reachable range [0, {max:.6e}]")]
    TargetOutOfRange { target: f64, max: f64 },

    /// The intensity carries no mass where some is required.
    #[error("intensity has zero mass on [0, {0:.6e}]")]
    ZeroMass(f64),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
