use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("non-manifold boundary at vertex {0}")]
    NonManifoldBoundary(usize),
    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),
    #[error("unsupported quadrature degree {0}")]
    UnsupportedQuadrature(usize),
    #[error("form {form} is not defined between {row} and {col}")]
    IncompatibleForm {
        form: String,
        row: String,
        col: String,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("thickness must be positive, got {0}")]
    NonPositiveThickness(f64),
    #[error("insufficient resolution: mesh has no interior vertices")]
    InsufficientResolution,
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("solve did not reach tolerance: relative residual {residual:e} > {tol:e}")]
    ToleranceNotMet { residual: f64, tol: f64 },
    #[error("problem too large for dense path: {n} > {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("manufactured loads fail the finite-difference oracle: relative error {0:e}")]
    OracleMismatch(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
