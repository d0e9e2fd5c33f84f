use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("pole at {at}")]
    Pole { at: f64 },
    #[error("{what} did not converge (partial value {partial}, estimated error {err})")]
    Convergence { what: &'static str, partial: f64, err: f64 },
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("physical unit conversion needs {0}")]
    Unit(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
