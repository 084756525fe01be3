use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("semigroup instance mismatch: expected {expected}, found {found}")]
    InstanceMismatch { expected: String, found: String },
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("grid must have at least 2 points, got {0}")]
    GridTooShort(usize),
    #[error("grid must start at 0 and end at 1 (got first={first}, last={last})")]
    GridEndpoint { first: f64, last: f64 },
    #[error("grid is not strictly increasing at index {0}")]
    NonMonotoneGrid(usize),
    #[error("grid point {0} is not finite or lies outside [0,1]")]
    GridPointOutOfRange(usize),
    #[error("value array has shape {found_rows}x{found_cols}, expected {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("functions do not share grids and semigroup instance")]
    GridMismatch,
    #[error("invalid family configuration: {0}")]
    InvalidConfig(String),
    #[error("generator {generator} is not available for instance {instance}")]
    IncompatibleGenerator { generator: String, instance: String },
    #[error("method {method} cannot be used with family {family}")]
    MethodIncompatible { method: String, family: String },
    #[error("{what}: size {size} exceeds the limit of {limit}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("function family must be non-empty with one label per member")]
    InvalidFamily,
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("tuple dimensions do not match: {0}")]
    TupleMismatch(String),
}

impl Error {
    /// True for errors raised by the enumeration/search size guards.
    pub fn is_size_guard(&self) -> bool {
        matches!(self, Error::SizeGuard { .. })
    }
}
