use thiserror::Error;

/// Errors raised by the linear-algebra kernel, state constructors and measures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid subsystem dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },

    #[error("state is not symmetric under subsystem permutations: {0}")]
    NotSymmetric(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
