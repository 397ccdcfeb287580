use thiserror::Error;

/// Errors raised by the geometry, problem, oracle and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point lies outside the domain an operation needs (e.g. a zero
    /// coordinate under the entropy DGF, or an infeasible iterate).
    #[error("domain error: {0}")]
    Domain(String),

    /// An inner scalar search or iterative solve did not terminate.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// The requested combination of norm, DGF and set has no prox rule here.
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    /// Invalid solver or schedule configuration.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn unsupported(msg: impl Into<String>) -> Error {
    Error::UnsupportedGeometry(msg.into())
}
