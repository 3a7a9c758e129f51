//! Error type shared by every crate in the workspace.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time {t} outside [0, {horizon}]")]
    OutOfDomain { t: f64, horizon: f64 },
    #[error("quadrature did not converge on [{a}, {b}] (estimated error {err:e})")]
    QuadratureFailure { a: f64, b: f64, err: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("argument outside U: {0}")]
    DomainViolation(String),
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),
    #[error("{t} is not an atom of the driver")]
    NotAnAtom { t: f64 },
    #[error("solution blew up at t = {t} (norm {norm:e})")]
    BlowUp { t: f64, norm: f64 },
    #[error("solution left the state space at t = {t}: {detail}")]
    DomainExit { t: f64, detail: String },
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("invalid driver measure: {0}")]
    InvalidDriver(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
    #[error("invalid rate: {0}")]
    InvalidRate(String),
    #[error("invalid times: {0}")]
    InvalidTimes(String),
    #[error("invalid noise specification: {0}")]
    InvalidNoise(String),
    #[error("insufficient paths: {got} < {need}")]
    InsufficientPaths { got: usize, need: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
