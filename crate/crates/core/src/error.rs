use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A lazy language was asked for an element beyond its enumeration bound.
    #[error("enumeration exhausted: {what} (bound {bound})")]
    ExhaustedEnumeration { what: String, bound: u64 },

    /// A game rule was broken. This is always a bug in a player implementation.
    #[error("engine invariant violated at t={t}: {detail}")]
    EngineInvariant { t: u64, detail: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
