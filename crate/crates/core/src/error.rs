use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is well posed but exceeds what this implementation supports.
    #[error("unsupported size: {0}")]
    Capability(String),

    /// A numerical invariant was violated (bracketing failed, a determinant
    /// that must be non-negative came out clearly negative, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The incomplete-gamma kernel recursions cannot reach this index pair.
    #[error("kernel index pair ({a}, {b}) is not reachable from the recursion bases")]
    Unreachable { a: f64, b: f64 },

    /// Malformed input data (asymmetric matrix, empty sample, ...).
    #[error("invalid input: {0}")]
    Input(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
