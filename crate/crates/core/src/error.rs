use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {0} lies outside [-1, 1]")]
    OutOfDomain(f64),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("quadrature exactness {actual} is below the required {required}")]
    InsufficientExactness { required: usize, actual: usize },

    #[error("gram defect {0} is not below 1")]
    GramDefectTooLarge(f64),

    #[error("springback requires 1 - lambda*alpha > 0 (lambda = {lambda}, alpha = {alpha})")]
    SpringbackConstraint { lambda: f64, alpha: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("zero reference signal")]
    ZeroReference,

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
