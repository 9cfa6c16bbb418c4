use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mixture has no components")]
    Empty,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("component {index}: weight must be positive and finite, got {weight}")]
    InvalidWeight { index: usize, weight: f64 },

    #[error("component {index}: covariance is not symmetric")]
    NotSymmetric { index: usize },

    #[error("component {index}: covariance is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { index: usize, min_eigenvalue: f64 },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("mixture is not homoscedastic")]
    NotHomoscedastic,

    #[error("affine rank of the means is zero; the mixture is a single Gaussian")]
    ZeroRank,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("problem size d={dim}, k={components} exceeds solver limits (d <= {max_dim}, k <= {max_components})")]
    TooLarge {
        dim: usize,
        components: usize,
        max_dim: usize,
        max_components: usize,
    },

    #[error("point is not critical: gradient residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotCritical { residual: f64, tolerance: f64 },

    #[error("padding boundary test failed after {doublings} separation doublings")]
    PaddingFailed { doublings: usize },

    #[error("no builder registered for seed ({dim}, {comps}, {modes})")]
    UnregisteredSeed { dim: u32, comps: u32, modes: u32 },

    #[error("malformed mixture file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
