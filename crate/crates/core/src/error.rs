use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrator failed to converge: {0}")]
    NonConvergence(String),

    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("missing limit data: {0}")]
    MissingLimit(String),

    #[error("phase-shift growth bound violated: {0}")]
    Growth(String),

    #[error("expression error: {0}")]
    Expr(String),

    #[error("insufficient decay: {0}")]
    InsufficientDecay(String),
}

pub type Result<T> = std::result::Result<T, Error>;
