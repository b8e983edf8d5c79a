//! Private authenticated channels and plain broadcast over a synchronous,
//! loss-free network. Every delivery is logged to the session transcript.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::party::PartyId;
use super::transcript::{ChannelKind, Event, Receivers, Transcript};
use super::ChannelError;
use crate::bits::BitString;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub from: PartyId,
    pub phase: String,
    pub kind: ChannelKind,
    pub payload: BitString,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Receipt {
    /// Index of the logged event in the transcript.
    pub event: usize,
    pub bits: usize,
}

#[derive(Debug)]
pub struct Network {
    parties: BTreeSet<PartyId>,
    inboxes: BTreeMap<PartyId, VecDeque<Envelope>>,
    transcript: Transcript,
    next_round: u64,
}

impl Network {
    pub fn new<I: IntoIterator<Item = PartyId>>(parties: I) -> Self {
        let parties: BTreeSet<PartyId> = parties.into_iter().collect();
        let inboxes = parties.iter().map(|p| (*p, VecDeque::new())).collect();
        Self {
            parties,
            inboxes,
            transcript: Transcript::new(),
            next_round: 0,
        }
    }

    pub fn parties(&self) -> &BTreeSet<PartyId> {
        &self.parties
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    fn check(&self, p: &PartyId) -> Result<(), ChannelError> {
        if self.parties.contains(p) {
            Ok(())
        } else {
            Err(ChannelError::UnknownParty(*p))
        }
    }

    pub fn send_private(
        &mut self,
        phase: &str,
        from: PartyId,
        to: PartyId,
        payload: BitString,
    ) -> Result<Receipt, ChannelError> {
        self.check(&from)?;
        self.check(&to)?;
        let bits = payload.len();
        let event = self.transcript.push(Event {
            phase: phase.to_string(),
            kind: ChannelKind::Private,
            sender: Some(from),
            receivers: Receivers::One(to),
            bits,
            payload: Some(payload.clone()),
            round: None,
        });
        self.inboxes.get_mut(&to).unwrap().push_back(Envelope {
            from,
            phase: phase.to_string(),
            kind: ChannelKind::Private,
            payload,
        });
        Ok(Receipt { event, bits })
    }

    /// Authenticated broadcast to every other party.
    pub fn broadcast(&mut self, phase: &str, from: PartyId, payload: BitString) -> Result<Receipt, ChannelError> {
        self.check(&from)?;
        let bits = payload.len();
        let event = self.transcript.push(Event {
            phase: phase.to_string(),
            kind: ChannelKind::Broadcast,
            sender: Some(from),
            receivers: Receivers::All,
            bits,
            payload: Some(payload.clone()),
            round: None,
        });
        for (p, inbox) in self.inboxes.iter_mut() {
            if *p != from {
                inbox.push_back(Envelope {
                    from,
                    phase: phase.to_string(),
                    kind: ChannelKind::Broadcast,
                    payload: payload.clone(),
                });
            }
        }
        Ok(Receipt { event, bits })
    }

    /// Drains everything delivered to `party` so far, in delivery order.
    pub fn take_inbox(&mut self, party: PartyId) -> Result<Vec<Envelope>, ChannelError> {
        self.check(&party)?;
        Ok(self.inboxes.get_mut(&party).unwrap().drain(..).collect())
    }

    /// Drains the inbox and keeps only private messages of `phase`.
    /// Broadcasts are read from the transcript or the round results instead.
    pub fn take_private(&mut self, party: PartyId, phase: &str) -> Result<Vec<Envelope>, ChannelError> {
        Ok(self
            .take_inbox(party)?
            .into_iter()
            .filter(|e| e.kind == ChannelKind::Private && e.phase == phase)
            .collect())
    }

    pub(crate) fn next_round_id(&mut self) -> u64 {
        self.next_round += 1;
        self.next_round - 1
    }

    pub(crate) fn log(&mut self, event: Event) -> usize {
        self.transcript.push(event)
    }

    pub(crate) fn require(&self, p: &PartyId) -> Result<(), ChannelError> {
        self.check(p)
    }
}
