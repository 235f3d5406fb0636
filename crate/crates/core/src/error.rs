use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario configuration: {0}")]
    InvalidConfig(String),

    #[error("linear_to_db requires a positive argument, got {0}")]
    NonPositiveLinear(f64),

    #[error("relay subset must not be empty")]
    EmptySubset,

    #[error("relay index {index} is out of range for {relay_count} relays")]
    RelayOutOfRange { index: usize, relay_count: usize },

    #[error("relay index {0} appears more than once in the subset")]
    DuplicateRelay(usize),

    #[error("relay {0} is not part of the active subset")]
    RelayNotInSubset(usize),

    #[error("power allocation does not match the active subset")]
    AllocationMismatch,

    #[error("amplification gain of relay {0} is undefined (zero received power)")]
    DegenerateGain(usize),

    #[error("simplified objective is undefined at relay {0}: no self-interference in the denominator")]
    ZeroSelfInterference(usize),

    #[error("partition does not cover the relay subset")]
    PartitionMismatch,

    #[error("the aggregate term (index 0) must be on the in-phase side")]
    PseudoIndexNotInPhase,

    #[error("partition instance must not be empty")]
    EmptyInstance,

    #[error("partition values must be finite and non-negative")]
    InvalidValue,

    #[error("brute force is limited to {max} values, got {n}")]
    TooManyValues { n: usize, max: usize },

    #[error("current point is infeasible (interference {interference} > threshold {threshold})")]
    Infeasible { interference: f64, threshold: f64 },

    #[error("no feasible operating point could be found")]
    NoFeasiblePoint,

    #[error("grid oracle is limited to {max} dimensions, got {dims}")]
    DimensionGuard { dims: usize, max: usize },

    #[error("relay selection is limited to {max} relays, got {relays}")]
    SelectionGuard { relays: usize, max: usize },

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
