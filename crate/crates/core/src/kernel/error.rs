use thiserror::Error;

/// Failures of the dense linear-algebra kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("weighted space mismatch in {context}")]
    SpaceMismatch { context: &'static str },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("matrix is singular to tolerance (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("matrix is not Hermitian (deviation {deviation:e} > tolerance {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },
    #[error("basis is rank deficient (rank {rank} of {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },
    #[error("LAPACK routine {routine} failed (info = {info})")]
    Lapack { routine: &'static str, info: i32 },
    #[error("linear algebra backend error: {0}")]
    Linalg(String),
    #[error("iteration did not converge: {0}")]
    NotConverged(String),
}

impl From<ndarray_linalg::error::LinalgError> for KernelError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        KernelError::Linalg(e.to_string())
    }
}

pub type KResult<T> = Result<T, KernelError>;
