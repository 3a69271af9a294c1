use thiserror::Error;

/// Errors produced by the equilibrium toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not admissible: no equilibrium measure exists (gamma2 - gamma1 = {excess} < 1)")]
    NotAdmissible { excess: f64 },

    #[error("no inner radius in this regime")]
    NoInnerRadius,

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("root finding failed: {0}")]
    Root(String),

    #[error("coincident points {i} and {j}")]
    CoincidentPoints { i: usize, j: usize },

    #[error("field not confining: particle radius {radius:e} exceeded guard {guard:e}")]
    NotConfining { radius: f64, guard: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
