//! Append-only message log and the per-party views derived from it.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::party::PartyId;
use crate::bits::BitString;
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Private,
    SimultaneousBroadcast,
    Broadcast,
    /// Marks the instant a simultaneous-broadcast round becomes readable.
    /// Carries no payload and is not a message.
    Reveal,
}

impl ChannelKind {
    pub fn is_message(&self) -> bool {
        !matches!(self, ChannelKind::Reveal)
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Private => "private",
            ChannelKind::SimultaneousBroadcast => "simultaneous-broadcast",
            ChannelKind::Broadcast => "broadcast",
            ChannelKind::Reveal => "reveal",
        })
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "private" => ChannelKind::Private,
            "simultaneous-broadcast" => ChannelKind::SimultaneousBroadcast,
            "broadcast" => ChannelKind::Broadcast,
            "reveal" => ChannelKind::Reveal,
            other => return Err(Error::config(format!("unknown channel kind `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Receivers {
    One(PartyId),
    All,
}

impl Receivers {
    pub fn includes(&self, party: &PartyId) -> bool {
        match self {
            Receivers::One(p) => p == party,
            Receivers::All => true,
        }
    }
}

impl fmt::Display for Receivers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Receivers::One(p) => write!(f, "{p}"),
            Receivers::All => f.write_str("*"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub phase: String,
    pub kind: ChannelKind,
    /// `None` only for reveal markers.
    pub sender: Option<PartyId>,
    pub receivers: Receivers,
    pub bits: usize,
    pub payload: Option<BitString>,
    /// Simultaneous-broadcast round this event belongs to.
    pub round: Option<u64>,
}

/// What an observer coalition can see of one event: always the metadata, the
/// payload only when the coalition was entitled to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewEvent {
    pub phase: String,
    pub kind: ChannelKind,
    pub sender: Option<PartyId>,
    pub receivers: Receivers,
    pub bits: usize,
    pub payload: Option<BitString>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, event: Event) -> usize {
        self.events.push(event);
        self.events.len() - 1
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The coalition's view of the log so far.
    pub fn view_for(&self, observers: &[PartyId]) -> Vec<ViewEvent> {
        self.view_prefix(observers, self.events.len())
    }

    /// The coalition's view of the first `upto` events.
    pub fn view_prefix(&self, observers: &[PartyId], upto: usize) -> Vec<ViewEvent> {
        let events = &self.events[..upto.min(self.events.len())];
        let revealed: BTreeSet<u64> = events
            .iter()
            .filter(|e| e.kind == ChannelKind::Reveal)
            .filter_map(|e| e.round)
            .collect();
        events
            .iter()
            .map(|e| {
                let visible = match e.kind {
                    ChannelKind::Private => {
                        e.sender.is_some_and(|s| observers.contains(&s))
                            || observers.iter().any(|o| e.receivers.includes(o))
                    }
                    ChannelKind::Broadcast | ChannelKind::Reveal => true,
                    ChannelKind::SimultaneousBroadcast => {
                        e.sender.is_some_and(|s| observers.contains(&s))
                            || e.round.is_some_and(|r| revealed.contains(&r))
                    }
                };
                ViewEvent {
                    phase: e.phase.clone(),
                    kind: e.kind,
                    sender: e.sender,
                    receivers: e.receivers.clone(),
                    bits: e.bits,
                    payload: if visible { e.payload.clone() } else { None },
                }
            })
            .collect()
    }

    /// One line per event:
    /// `phase<TAB>kind<TAB>sender<TAB>receivers<TAB>bits[<TAB>hex-payload]`.
    /// The sender of a reveal marker is written as `-`.
    pub fn write_tsv<W: Write>(&self, mut out: W, with_payloads: bool) -> std::io::Result<()> {
        for e in &self.events {
            let sender = e.sender.map_or_else(|| "-".to_string(), |s| s.to_string());
            write!(out, "{}\t{}\t{}\t{}\t{}", e.phase, e.kind, sender, e.receivers, e.bits)?;
            if with_payloads {
                if let Some(p) = &e.payload {
                    write!(out, "\t{}", p.to_hex())?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Inverse of [`Transcript::write_tsv`]. Round ids are reassigned in
    /// order: every simultaneous-broadcast event belongs to the next reveal.
    pub fn parse_tsv<R: BufRead>(input: R) -> Result<Self, Error> {
        let mut events = Vec::new();
        let mut round = 0u64;
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::config(e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::config(format!("transcript line {}: {what}", lineno + 1));
            let fields: Vec<&str> = line.split('\t').collect();
            if !(5..=6).contains(&fields.len()) {
                return Err(bad("expected 5 or 6 tab-separated fields"));
            }
            let kind: ChannelKind = fields[1].parse()?;
            let sender = match fields[2] {
                "-" => None,
                s => Some(s.parse()?),
            };
            let receivers = match fields[3] {
                "*" => Receivers::All,
                s => Receivers::One(s.parse()?),
            };
            let bits: usize = fields[4].parse().map_err(|_| bad("bad bit count"))?;
            let payload = fields
                .get(5)
                .map(|h| BitString::from_hex(h, bits).map_err(|_| bad("bad hex payload")))
                .transpose()?;
            let round_id = match kind {
                ChannelKind::SimultaneousBroadcast => Some(round),
                ChannelKind::Reveal => {
                    round += 1;
                    Some(round - 1)
                }
                _ => None,
            };
            events.push(Event {
                phase: fields[0].to_string(),
                kind,
                sender,
                receivers,
                bits,
                payload,
                round: round_id,
            });
        }
        Ok(Self { events })
    }
}
