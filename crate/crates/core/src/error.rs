use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The integrand produced NaN or ±∞ at an interior point.
    #[error("integrand returned {value} at interior point {at}")]
    NonFiniteIntegrand { at: f64, value: f64 },

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    /// Series order beyond the supported maximum.
    #[error("series order {requested} exceeds the supported maximum {max}")]
    OrderTooLarge { requested: usize, max: usize },

    /// The requested truncation lies past the smallest term of a divergent series.
    #[error("truncation order {requested} lies past the smallest term (index {optimal}) at log x = {log_x}")]
    PastOptimalTruncation {
        requested: usize,
        optimal: usize,
        log_x: f64,
    },

    #[error("invalid check specification: {0}")]
    InvalidCheck(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
