//! Crate-wide error type.

use std::fmt;

/// Convenience alias used by every fallible operation in the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by grid construction, operator algebra, reference solvers
/// and the study driver.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A grid was requested with fewer points than the stencils need.
    GridTooSmall { points: usize, minimum: usize },
    /// The requested interval has `upper <= lower`.
    DegenerateInterval { lower: f64, upper: f64 },
    /// Two operands live on different grids or have mismatched dimensions.
    DimensionMismatch { left: usize, right: usize, context: &'static str },
    /// A derivative or stencil order outside the supported range.
    UnsupportedOrder { order: usize, context: &'static str },
    /// An eigen-basis failed its residual check and cannot be used.
    FactorizationFailed { residual: f64, tolerance: f64 },
    /// A vector or matrix entry became non-finite where finiteness is required.
    NonFiniteSample { context: &'static str },
    /// An index pair `(j, level)` or multi-index violated a precondition.
    IndexOutOfRange { what: &'static str, got: usize, limit: usize },
    /// A quadrature or solver parameter violated its documented precondition.
    InvalidParameter { what: &'static str, detail: String },
    /// Too few data points to fit a decay order (needs at least three).
    InsufficientData { what: &'static str, got: usize, needed: usize },
    /// The study configuration could not be parsed or validated.
    Config(String),
    /// Filesystem failure while writing study artifacts.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::GridTooSmall { points, minimum } => {
                write!(f, "grid has {points} points but at least {minimum} are required")
            }
            Error::DegenerateInterval { lower, upper } => {
                write!(f, "interval [{lower}, {upper}] is empty or degenerate")
            }
            Error::DimensionMismatch { left, right, context } => {
                write!(f, "dimension mismatch in {context}: {left} vs {right}")
            }
            Error::UnsupportedOrder { order, context } => {
                write!(f, "unsupported order {order} in {context}")
            }
            Error::FactorizationFailed { residual, tolerance } => {
                write!(
                    f,
                    "eigen-basis residual {residual:.3e} exceeds tolerance {tolerance:.3e}"
                )
            }
            Error::NonFiniteSample { context } => {
                write!(f, "non-finite value encountered in {context}")
            }
            Error::IndexOutOfRange { what, got, limit } => {
                write!(f, "{what} = {got} out of range (limit {limit})")
            }
            Error::InvalidParameter { what, detail } => {
                write!(f, "invalid {what}: {detail}")
            }
            Error::InsufficientData { what, got, needed } => {
                write!(f, "{what}: got {got} data points, need at least {needed}")
            }
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
