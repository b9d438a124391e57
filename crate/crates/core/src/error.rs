use thiserror::Error;

use crate::geometry::RegionViolation;
use crate::tiling::HeightConfig;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid region size {0}: L must be even and at least 2")]
    InvalidSize(i64),
    #[error("invalid hexagon sides {0}x{1}x{2}: all sides must be positive")]
    InvalidHexagon(i64, i64, i64),
    #[error("region construction failed: {}", join(.0))]
    RegionInvalid(Vec<RegionViolation>),
    #[error("region is not tileable with its boundary heights: {0}")]
    Untileable(String),
    #[error("height array has {found} entries, region has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("move {0} is not applicable")]
    NotApplicable(String),
    #[error("reduction stuck at volume {volume} with no lowering move")]
    ReductionStuck { volume: i64, config: Box<HeightConfig> },
    #[error("vertex {0} is not a local maximum")]
    NotLocalMaximum(String),
    #[error("enumeration cap {cap} exceeded after {found} configurations")]
    CapExceeded { cap: usize, found: usize },
    #[error("colored basis dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: u128, cap: u128 },
    #[error("flip graph is disconnected")]
    Disconnected,
    #[error("color line is not a balanced Dyck word (axis {axis}, {detail})")]
    NotDyck { axis: char, detail: String },
    #[error("cut column is empty")]
    EmptyCut,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Resource-cap failures map to a distinct process exit code.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::DimensionCap { .. })
    }
}

fn join(v: &[RegionViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
