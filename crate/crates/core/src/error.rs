use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("degenerate vertex {index}: interior angle {angle} is too close to 0, π or 2π")]
    DegenerateVertex { index: usize, angle: f64 },
    #[error("polygons have different vertex counts ({0} vs {1})")]
    MismatchedN(usize, usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("index {index} out of range for a polygon with {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("line of side {0} is parallel to an adjacent side")]
    ParallelAdjacentSide(usize),
    #[error("perturbation parameter {t} leaves the admissible range: {reason}")]
    OutOfRange { t: f64, reason: String },
    #[error("psi is undefined at {0} (domain is the open interval (0, 2π))")]
    Domain(f64),
    #[error("invalid flow start: {0}")]
    InvalidStart(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("format error: {0}")]
    Format(String),
}
