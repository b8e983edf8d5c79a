//! Communication substrate: private channels, plain and simultaneous
//! broadcast, the session transcript and message accounting.

mod accounting;
mod network;
mod party;
mod simbroadcast;
mod transcript;

use thiserror::Error;

pub use accounting::{accounting_report, AccountingReport, AccountingRow};
pub use network::{Envelope, Network, Receipt};
pub use party::{PartyId, Role};
pub use simbroadcast::{
    CommitRevealRound, CommitRevealTransport, Commitment, MemoryTransport, Opening, RoundState, SimBroadcastRound,
    SimultaneousBroadcast, Transport, DIGEST_BITS, NONCE_BITS,
};
pub use transcript::{ChannelKind, Event, Receivers, Transcript, ViewEvent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChannelError {
    #[error("unknown party {0}")]
    UnknownParty(PartyId),
    #[error("round {round} aborted: {party} did not submit")]
    MissingParticipant { round: u64, party: PartyId },
    #[error("{0} submitted twice")]
    DoubleSubmission(PartyId),
    #[error("{0} is not a participant of this round")]
    UnexpectedParticipant(PartyId),
    #[error("opening by {0} does not match its commitment")]
    BadOpening(PartyId),
    #[error("round {0} is already revealed")]
    RoundClosed(u64),
}

impl ChannelError {
    /// The party blamed for the error, if any.
    pub fn offender(&self) -> Option<PartyId> {
        match self {
            ChannelError::UnknownParty(p)
            | ChannelError::DoubleSubmission(p)
            | ChannelError::UnexpectedParticipant(p)
            | ChannelError::BadOpening(p) => Some(*p),
            ChannelError::MissingParticipant { party, .. } => Some(*party),
            ChannelError::RoundClosed(_) => None,
        }
    }
}
