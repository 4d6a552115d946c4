use thiserror::Error;

use crate::model::{ExplanationKind, Label};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("model must have at least one feature")]
    EmptyModel,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid domain for feature {feature}: [{lower}, {upper}]")]
    InvalidDomain {
        feature: usize,
        lower: f64,
        upper: f64,
    },

    #[error("feature {feature} value {value} lies outside its domain [{lower}, {upper}]")]
    OutOfDomain {
        feature: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("thresholds must satisfy t_minus < t_plus (got t_minus={t_minus}, t_plus={t_plus})")]
    InvalidThresholds { t_minus: f64, t_plus: f64 },

    #[error("feature index {index} out of range for {n} features")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("explanation kind {kind:?} does not match prediction {label:?}")]
    KindMismatch { kind: ExplanationKind, label: Label },

    #[error("brute-force search refuses {n} features (limit {limit})")]
    TooManyFeatures { n: usize, limit: usize },

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
