use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 64")]
    GridSize(usize),

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("derivative order {0} not supported (expected 1 or 2)")]
    DerivativeOrder(u32),

    /// Radius of curvature fell to or below the convexity floor.
    #[error("body is not strictly convex: radius of curvature {min:.3e} at index {index}")]
    NonConvex { min: f64, index: usize },

    #[error("origin is not interior: support value {min:.3e} at index {index}")]
    OriginNotInterior { min: f64, index: usize },

    #[error("linear map is singular (det = {0:.3e})")]
    SingularMap(f64),

    #[error("moment matrix is degenerate (condition number {0:.3e})")]
    FrameFailure(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
