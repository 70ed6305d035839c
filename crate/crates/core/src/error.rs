use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("norm {norm} exceeds tolerance (|norm - 1| = {deviation:.3e} > {tol:e})")]
    NotNormalized { norm: f64, deviation: f64, tol: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:.3e} > {tol:e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e} < -{tol:e})")]
    NotPositive { min_eigenvalue: f64, tol: f64 },

    #[error("trace {trace} differs from 1 beyond tolerance {tol:e}")]
    BadTrace { trace: f64, tol: f64 },

    #[error("invalid probabilities: {0}")]
    Probabilities(String),

    #[error("operator {index} is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { index: usize, deviation: f64 },

    #[error("operator {index} is not rank one (singular value ratio {ratio:.3e})")]
    NotRankOne { index: usize, ratio: f64 },

    #[error("state is not maximally entangled: {0}")]
    NotMaximallyEntangled(String),

    #[error("channel output has zero trace")]
    ZeroTrace,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Input-validation failures, as opposed to numerical breakdowns.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
