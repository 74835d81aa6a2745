use thiserror::Error;

/// Errors raised by the operator layer and the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid piecewise-linear function: {0}")]
    InvalidFunction(String),
    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),
    #[error("invalid boundary function: {0}")]
    InvalidBoundary(String),
    #[error("running supremum is +inf: right tail slope {0} is positive")]
    UnboundedAbove(String),
    #[error("running infimum is -inf: left tail slope {0} is positive")]
    UnboundedBelow(String),
    #[error("boundary function is not semi-coercive (left tail slope must be negative)")]
    NotSemiCoercive,
    #[error("internal mismatch: {0}")]
    InternalMismatch(String),
    #[error("root isolation failed: {0}")]
    RootNotFound(String),
    #[error("CFL number {cfl} outside (0, 1]")]
    CflViolation { cfl: f64 },
    #[error("domain too short: T * L_lip = {reach} but only {available} is available")]
    DomainTooShort { reach: f64, available: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
