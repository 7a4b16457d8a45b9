use thiserror::Error;

/// Errors raised by the numeric engines, the simulators and the graph builder.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the requested quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An infinite sum hit its term cap before the tail bound fell below tolerance.
    #[error("series did not converge within {terms} terms (last term {last_term:e})")]
    NotConverged { terms: u64, last_term: f64 },

    /// A simulated trace ran past the configured event cap.
    #[error("simulation exceeded the event cap of {cap} events")]
    EventCap { cap: u64 },

    #[error("malformed trace: {0}")]
    MalformedTrace(String),

    /// Two computations that must agree by construction did not.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
