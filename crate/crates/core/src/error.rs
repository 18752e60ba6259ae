use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("derivative order {0} exceeds the supported maximum of 3")]
    UnsupportedOrder(usize),
    #[error("slit bundle violated: |y| = {norm:e} is below {min:e}")]
    SlitBundle { norm: f64, min: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {0} is unsupported (need n >= 2)")]
    DimensionTooSmall(usize),
    #[error("non-finite coordinate in point")]
    NonFinite,
    #[error("index {index} out of range for {len} slots")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("degenerate metric: Cholesky pivot {pivot:e} at row {row} is below {tol:e}")]
    DegenerateMetric { row: usize, pivot: f64, tol: f64 },
    #[error("point is off the indicatrix: |F - 1| = {defect:e}")]
    OffIndicatrix { defect: f64 },
    #[error("vector is not tangent to the indicatrix: |dF(v)| = {defect:e}")]
    NotTangent { defect: f64 },
    #[error("finite-difference oracle unstable: step {step:e} underflows at coordinate {coord}")]
    OracleUnstable { step: f64, coord: f64 },
    #[error("indicatrix projection did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("singular linear system")]
    Singular,
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("invalid metric parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
