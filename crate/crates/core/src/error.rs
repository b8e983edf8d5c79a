use thiserror::Error;

use crate::channels::ChannelError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid ballot: {0}")]
    InvalidBallot(String),

    #[error("protocol failure: {0}")]
    ProtocolFailure(String),

    #[error("subset selection needs more randomness: {available} bits available, chunk width {chunk_bits}")]
    NeedsMoreRandomness { available: usize, chunk_bits: usize },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error(transparent)]
    Channel(#[from] ChannelError),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }
}
