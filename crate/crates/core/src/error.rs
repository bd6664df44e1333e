use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite result at input {input:?}")]
    NonFinite { input: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation only supported in dimension {supported}, got {got}")]
    UnsupportedDimension { supported: usize, got: usize },

    #[error("momentum refresh requires a quadratic (separable) kinetic energy")]
    UnsupportedKinetic,

    #[error("unknown target `{name}`; known targets: {}", known.join(", "))]
    UnknownTarget { name: String, known: Vec<String> },
}
