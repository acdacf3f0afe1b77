use std::fmt;

/// Failure modes shared by all modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point or parameter lies outside the domain of definition.
    Domain(String),
    /// Sampling or grid resolution too coarse for the requested quantity.
    Resolution(String),
    /// A numerical procedure failed to converge or became unstable.
    Numeric(String),
    /// Invalid parameter combination (out-of-range exponents, empty sweeps, ...).
    Parameter(String),
    /// Multi-index or component index out of range.
    Index(String),
    /// A kernel violated a structural requirement (cancellation, homogeneity).
    Kernel(String),
    /// The assembled linear system could not be solved.
    Solve(String),
    /// Input data violate a stated precondition.
    Precondition(String),
    /// Degenerate input (identically zero where a ratio is required).
    Degenerate(String),
    /// Requested order or case outside the supported desk scale.
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Resolution(m) => write!(f, "resolution error: {m}"),
            Error::Numeric(m) => write!(f, "numeric error: {m}"),
            Error::Parameter(m) => write!(f, "parameter error: {m}"),
            Error::Index(m) => write!(f, "index error: {m}"),
            Error::Kernel(m) => write!(f, "kernel error: {m}"),
            Error::Solve(m) => write!(f, "solve error: {m}"),
            Error::Precondition(m) => write!(f, "precondition error: {m}"),
            Error::Degenerate(m) => write!(f, "degenerate input: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
