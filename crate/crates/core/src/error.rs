use thiserror::Error;

/// Errors raised by the solvers, simulators and file readers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("root not bracketed: {0}")]
    NoBracket(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("asymptotic regime violated: {0}")]
    Regime(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Numeric,
    Invariant,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_) | Error::Parse(_) | Error::Io(_) => ErrorClass::Usage,
            Error::Invariant(_) => ErrorClass::Invariant,
            _ => ErrorClass::Numeric,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Domain(_) => "domain",
            Error::NoBracket(_) => "no_bracket",
            Error::Quadrature(_) => "quadrature",
            Error::Solver(_) => "solver",
            Error::Regime(_) => "regime",
            Error::Invariant(_) => "invariant",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
