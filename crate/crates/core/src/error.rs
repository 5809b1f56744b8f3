use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation (index out of
    /// range, mismatched dimensions, non-unit direction, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix or table failed a structural check (unitarity, stochasticity, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Power iteration hit its iteration cap.
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// The dominant eigenvalue is not separated from the next one.
    #[error("degenerate top eigenvalue{}: gap {gap:e}", .block.map(|k| format!(" for block {k}")).unwrap_or_default())]
    Degenerate { block: Option<usize>, gap: f64 },

    /// A network key does not belong to the gate library it is used with.
    #[error("key error: {0}")]
    Key(String),

    /// A serialized key or key file is malformed.
    #[error("format error: {0}")]
    Format(String),

    /// A configured size cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// A message source ran dry before the requested work was done.
    #[error("message budget exhausted after {consumed} messages")]
    Budget { consumed: usize },

    /// The no-cloning contract of the quantum channel was violated.
    #[error("channel contract violation: {0}")]
    Contract(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
