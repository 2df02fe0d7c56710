use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The exact computation would need more terms than the configured cap.
    #[error("capacity exceeded: breakpoint m0={m0} is above the cap of {cap} terms")]
    Capacity { m0: f64, cap: u64 },

    /// No sample size up to the search cap meets the requested risk.
    #[error("target risk {target} is not reachable with n <= {cap}")]
    Unreachable { target: f64, cap: u64 },

    /// An iterative scheme stopped before meeting its tolerance.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("i/o error: {0}")]
    Io(String),
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

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
