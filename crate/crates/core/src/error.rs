use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Variants are grouped by the way a caller is expected to react: bad input
/// ranges, evaluation outside a method's regime, and work-size guards.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value out of bounds: {0}")]
    Bounds(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("outside evaluation regime: {0}")]
    Regime(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("too close to a pole: {0}")]
    Pole(String),
    #[error("series truncation insufficient: {0}")]
    Truncation(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("scheme undefined: {0}")]
    SchemeUndefined(String),
    #[error("prime table does not cover {0}")]
    Coverage(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable lower-case tag for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Bounds(_) => "bounds",
            Error::Domain(_) => "domain",
            Error::Regime(_) => "regime",
            Error::Capacity(_) => "capacity",
            Error::Index(_) => "index",
            Error::Pole(_) => "pole",
            Error::Truncation(_) => "truncation",
            Error::Config(_) => "config",
            Error::SchemeUndefined(_) => "scheme_undefined",
            Error::Coverage(_) => "coverage",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
