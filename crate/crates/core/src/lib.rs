//! Simulation of information-theoretically private voting among `n` voters
//! and `r` authorities.
//!
//! Votes are spread over random positions of an `m × n²s` bit matrix and
//! tallied through shared parities. Three protocols of increasing strength
//! are provided in [`protocols`]; [`harness`] runs them many times and
//! measures failure rates, revocations and message cost.

pub mod adversary;
pub mod bits;
pub mod channels;
pub mod config;
pub mod error;
pub mod harness;
pub mod primitives;
pub mod protocols;
pub mod tally;

pub use bits::{Bit, BitString};
pub use config::{ProtocolConfig, TransportKind};
pub use error::{Error, Result};
