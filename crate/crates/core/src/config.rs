//! Election parameters shared by every protocol.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Realization of the simultaneous broadcast channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportKind {
    /// Trusted collect-then-reveal.
    #[default]
    Memory,
    /// Hash commitments over plain broadcast, then openings.
    CommitReveal,
}

impl fmt::Display for TransportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransportKind::Memory => "memory",
            TransportKind::CommitReveal => "commit-reveal",
        })
    }
}

impl FromStr for TransportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "memory" => Ok(TransportKind::Memory),
            "commit-reveal" => Ok(TransportKind::CommitReveal),
            other => Err(Error::config(format!("unknown transport `{other}`"))),
        }
    }
}

/// `n` voters, `m` candidates, `r` authorities and security parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub voters: usize,
    pub candidates: usize,
    pub authorities: usize,
    pub security: usize,
    /// Adds one extra candidate that voters can pick to cancel their ballot.
    /// Its count takes part in the consistency check but is not reported.
    #[serde(default)]
    pub dummy_candidate: bool,
    #[serde(default)]
    pub transport: TransportKind,
}

impl ProtocolConfig {
    pub fn new(voters: usize, candidates: usize, authorities: usize, security: usize) -> Self {
        Self {
            voters,
            candidates,
            authorities,
            security,
            dummy_candidate: false,
            transport: TransportKind::Memory,
        }
    }

    pub fn with_transport(mut self, transport: TransportKind) -> Self {
        self.transport = transport;
        self
    }

    pub fn with_dummy_candidate(mut self, enabled: bool) -> Self {
        self.dummy_candidate = enabled;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.voters < 3 {
            return Err(Error::param(format!("need at least 3 voters, got {}", self.voters)));
        }
        if self.candidates < 1 {
            return Err(Error::param("need at least one candidate"));
        }
        if self.authorities < 1 {
            return Err(Error::param("need at least one authority"));
        }
        if self.security < 1 {
            return Err(Error::param("security parameter must be at least 1"));
        }
        Ok(())
    }

    /// Rows of a vote matrix: `m`, plus one when the dummy candidate is on.
    pub fn effective_candidates(&self) -> usize {
        self.candidates + usize::from(self.dummy_candidate)
    }

    /// Bits per candidate row, `n²s`.
    pub fn positions(&self) -> usize {
        self.voters * self.voters * self.security
    }

    /// Ones in the chosen row of a correct vote, `ns`.
    pub fn marked(&self) -> usize {
        self.voters * self.security
    }

    /// Bits in one full vote, `m·n²s`.
    pub fn vote_bits(&self) -> usize {
        self.effective_candidates() * self.positions()
    }

    /// Candidate index reserved for the dummy candidate, if enabled (1-based).
    pub fn dummy_index(&self) -> Option<usize> {
        self.dummy_candidate.then_some(self.candidates + 1)
    }
}
