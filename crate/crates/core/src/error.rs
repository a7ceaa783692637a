use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of a formula (negative SNR, empty subset, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    /// The requested rate point admits no split (or lies outside / on the
    /// boundary of the region). `constraint` names the offending constraint.
    #[error("infeasible: {constraint} (slack {slack:.3e})")]
    Infeasible { constraint: String, slack: f64 },

    #[error("size cap exceeded: {count:.3e} candidates > cap {cap}; {advice}")]
    SizeCap { count: f64, cap: u64, advice: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
