use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("operator is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    Trace(f64),

    #[error("operator is not positive semidefinite (minimum eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state has a positive partial transpose; no decomposable witness detects it")]
    NoNptWitness,

    #[error("operator is block-positive; no separable state detects it")]
    NotWitnessable,

    #[error("operator is not block-positive (minimum product expectation {0:.3e})")]
    NotBlockPositive(f64),

    #[error("state is not entangled")]
    NotEntangled,

    #[error("separable state has no family")]
    NoFamily,

    #[error("witness sample is empty")]
    EmptySample,

    #[error("inconsistent delta: {0}")]
    InconsistentDelta(String),
}

pub type Result<T> = std::result::Result<T, Error>;
