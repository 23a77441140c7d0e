use crate::symplectic::Basis;

/// Errors raised by the simulation kernels.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("basis mismatch: model uses {model:?} basis, symplectic form uses {form:?}")]
    BasisMismatch { model: Basis, form: Basis },

    #[error("matrix is not symplectic: defect {defect:e} exceeds tolerance {tolerance:e}")]
    NotSymplectic { defect: f64, tolerance: f64 },

    #[error("group for n = {n} is too large to enumerate (limit n <= {limit}); use sampling")]
    EnumerationTooLarge { n: usize, limit: usize },

    #[error("generators reach {reached} of {order} group elements")]
    NotGenerating { reached: usize, order: usize },

    #[error("graph is not Eulerian: {0}")]
    NotEulerian(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Hilbert space dimension {dim} exceeds limit {limit}")]
    HilbertSpaceTooLarge { dim: usize, limit: usize },

    #[error("second-moment generator of size {size} exceeds dense limit {limit}; use Monte Carlo")]
    GeneratorTooLarge { size: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix logarithm failed: {0}")]
    Logarithm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
