use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A level, radius or parameter outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input that breaks a type invariant (non-unit normal, p outside (0,1), ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Evaluation at r = 0 where log r is singular.
    #[error("singularity: {0}")]
    Singularity(String),

    /// A precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A bounded search found nothing.
    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    /// The step oracle cannot supply information the operation needs.
    #[error("capability error: {0}")]
    Capability(String),

    /// Path simulation failed at a specific step.
    #[error("simulation error at step {step}: {message}")]
    Simulation { step: u64, message: String },

    /// A Monte Carlo replication failed.
    #[error("replication {index} failed: {source}")]
    Replication {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    /// Not enough usable samples to form an estimate.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem or serialization failure while writing reports.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Wraps `self` as the failure of replication `index`.
    pub fn in_replication(self, index: u64) -> Self {
        Error::Replication {
            index,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
