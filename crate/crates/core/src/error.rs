use thiserror::Error;

/// Failure modes shared by every module of the engine.
///
/// Each variant corresponds to a named failure case; [`Error::name`] returns
/// that name for front ends that report errors by kind (the CLI prints it,
/// the C ABI maps it to a status code).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cubic has a complex root pair (discriminant {discriminant:e})")]
    NonRealRoots { discriminant: f64 },

    #[error("matrix is not positive definite (leading minor {minor:e})")]
    NotPositiveDefinite { minor: f64 },

    #[error("ODE integration exceeded {max_steps} steps at t = {t}")]
    StepLimitExceeded { max_steps: usize, t: f64 },

    #[error("ODE right-hand side produced a non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("quadrature tolerance {tol:e} not met (estimated error {estimate:e})")]
    ToleranceNotMet { tol: f64, estimate: f64 },

    #[error("function does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("non-finite derivative of scalar field at ({x1}, {x2}, {x3})")]
    DerivativeFailure { x1: f64, x2: f64, x3: f64 },

    #[error("value {value} outside admissible range: {expected}")]
    OutOfRange { value: f64, expected: &'static str },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("shooting did not converge after {iterations} iterations (miss {miss:e})")]
    NoConvergence { iterations: usize, miss: f64 },

    #[error("invalid settings: {0}")]
    InvalidSettings(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonRealRoots { .. } => "NonRealRoots",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::StepLimitExceeded { .. } => "StepLimitExceeded",
            Error::NonFiniteState { .. } => "NonFiniteState",
            Error::ToleranceNotMet { .. } => "ToleranceNotMet",
            Error::NoSignChange { .. } => "NoSignChange",
            Error::DerivativeFailure { .. } => "DerivativeFailure",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::DomainError(_) => "DomainError",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::InvalidSettings(_) => "InvalidSettings",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::DomainError(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
