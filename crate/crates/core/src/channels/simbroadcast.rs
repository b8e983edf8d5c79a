//! Simultaneous broadcast: no participant's input may depend on another's.
//!
//! Two realizations share the [`SimultaneousBroadcast`] contract:
//! [`MemoryTransport`] collects every submission and reveals them together,
//! [`CommitRevealTransport`] has every party broadcast a hash commitment
//! first and open it once all commitments are in.

use std::collections::{BTreeMap, BTreeSet};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use super::network::Network;
use super::party::PartyId;
use super::transcript::{ChannelKind, Event, Receivers};
use super::ChannelError;
use crate::bits::BitString;
use crate::config::TransportKind;

const COMMIT_DOMAIN: &[u8] = b"vote-sim/simultaneous-broadcast/v1";
pub const DIGEST_BITS: usize = 256;
pub const NONCE_BITS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundState {
    Collecting,
    Revealed,
}

/// Collect-then-reveal round. Submissions are unreadable until every
/// expected participant has submitted exactly once.
#[derive(Debug, Clone)]
pub struct SimBroadcastRound {
    round_id: u64,
    expected: BTreeSet<PartyId>,
    submissions: BTreeMap<PartyId, BitString>,
    state: RoundState,
}

impl SimBroadcastRound {
    pub fn new<I: IntoIterator<Item = PartyId>>(round_id: u64, expected: I) -> Self {
        let expected: BTreeSet<PartyId> = expected.into_iter().collect();
        let state = if expected.is_empty() {
            RoundState::Revealed
        } else {
            RoundState::Collecting
        };
        Self {
            round_id,
            expected,
            submissions: BTreeMap::new(),
            state,
        }
    }

    pub fn round_id(&self) -> u64 {
        self.round_id
    }

    pub fn state(&self) -> RoundState {
        self.state
    }

    pub fn submit(&mut self, from: PartyId, value: BitString) -> Result<(), ChannelError> {
        if !self.expected.contains(&from) {
            return Err(ChannelError::UnexpectedParticipant(from));
        }
        if self.submissions.contains_key(&from) {
            return Err(ChannelError::DoubleSubmission(from));
        }
        if self.state == RoundState::Revealed {
            return Err(ChannelError::RoundClosed(self.round_id));
        }
        self.submissions.insert(from, value);
        if self.submissions.len() == self.expected.len() {
            self.state = RoundState::Revealed;
        }
        Ok(())
    }

    /// What `_observer` can read right now: nothing before the reveal.
    pub fn observe(&self, _observer: PartyId) -> Option<&BTreeMap<PartyId, BitString>> {
        match self.state {
            RoundState::Revealed => Some(&self.submissions),
            RoundState::Collecting => None,
        }
    }

    /// Ends the round: the revealed submissions, or the first missing party.
    pub fn close(self) -> Result<BTreeMap<PartyId, BitString>, ChannelError> {
        if let Some(missing) = self.expected.iter().find(|p| !self.submissions.contains_key(p)) {
            return Err(ChannelError::MissingParticipant {
                round: self.round_id,
                party: *missing,
            });
        }
        Ok(self.submissions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Commitment {
    pub digest: [u8; 32],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Opening {
    pub value: BitString,
    pub nonce: [u8; 32],
}

impl Commitment {
    /// SHA-256 over `domain ‖ round ‖ sender ‖ |value| ‖ value ‖ nonce`.
    pub fn new(round_id: u64, sender: PartyId, opening: &Opening) -> Self {
        let mut h = Sha256::new();
        h.update(COMMIT_DOMAIN);
        h.update(round_id.to_le_bytes());
        h.update(sender.stream_id().to_le_bytes());
        h.update((opening.value.len() as u64).to_le_bytes());
        h.update(opening.value.to_bytes());
        h.update(opening.nonce);
        Self { digest: h.finalize().into() }
    }

    pub fn verify(&self, round_id: u64, sender: PartyId, opening: &Opening) -> bool {
        Commitment::new(round_id, sender, opening) == *self
    }

    pub fn to_bits(&self) -> BitString {
        BitString::from_bytes(&self.digest, DIGEST_BITS)
    }
}

impl Opening {
    /// Value bits followed by the nonce bits.
    pub fn to_bits(&self) -> BitString {
        let mut out = self.value.clone();
        out.extend_from(&BitString::from_bytes(&self.nonce, NONCE_BITS));
        out
    }
}

/// Commit-then-open round.
#[derive(Debug, Clone)]
pub struct CommitRevealRound {
    round_id: u64,
    expected: BTreeSet<PartyId>,
    commitments: BTreeMap<PartyId, Commitment>,
    openings: BTreeMap<PartyId, BitString>,
}

impl CommitRevealRound {
    pub fn new<I: IntoIterator<Item = PartyId>>(round_id: u64, expected: I) -> Self {
        Self {
            round_id,
            expected: expected.into_iter().collect(),
            commitments: BTreeMap::new(),
            openings: BTreeMap::new(),
        }
    }

    pub fn commit(&mut self, from: PartyId, c: Commitment) -> Result<(), ChannelError> {
        if !self.expected.contains(&from) {
            return Err(ChannelError::UnexpectedParticipant(from));
        }
        if self.commitments.insert(from, c).is_some() {
            return Err(ChannelError::DoubleSubmission(from));
        }
        Ok(())
    }

    /// Errors with the first party that has not committed.
    pub fn commitments_complete(&self) -> Result<(), ChannelError> {
        match self.expected.iter().find(|p| !self.commitments.contains_key(p)) {
            Some(p) => Err(ChannelError::MissingParticipant {
                round: self.round_id,
                party: *p,
            }),
            None => Ok(()),
        }
    }

    pub fn open(&mut self, from: PartyId, opening: Opening) -> Result<(), ChannelError> {
        self.commitments_complete()?;
        let c = self
            .commitments
            .get(&from)
            .ok_or(ChannelError::UnexpectedParticipant(from))?;
        if self.openings.contains_key(&from) {
            return Err(ChannelError::DoubleSubmission(from));
        }
        if !c.verify(self.round_id, from, &opening) {
            return Err(ChannelError::BadOpening(from));
        }
        self.openings.insert(from, opening.value);
        Ok(())
    }

    pub fn finish(self) -> Result<BTreeMap<PartyId, BitString>, ChannelError> {
        if let Some(p) = self.expected.iter().find(|p| !self.openings.contains_key(p)) {
            return Err(ChannelError::MissingParticipant {
                round: self.round_id,
                party: *p,
            });
        }
        Ok(self.openings)
    }
}

/// One simultaneous-broadcast exchange among `expected`. A `None` submission
/// means the party withheld its input; the round then aborts naming it.
pub trait SimultaneousBroadcast {
    fn exchange(
        &mut self,
        net: &mut Network,
        phase: &str,
        expected: &[PartyId],
        submissions: Vec<(PartyId, Option<BitString>)>,
    ) -> Result<BTreeMap<PartyId, BitString>, ChannelError>;
}

#[derive(Debug, Default, Clone)]
pub struct MemoryTransport;

impl SimultaneousBroadcast for MemoryTransport {
    fn exchange(
        &mut self,
        net: &mut Network,
        phase: &str,
        expected: &[PartyId],
        submissions: Vec<(PartyId, Option<BitString>)>,
    ) -> Result<BTreeMap<PartyId, BitString>, ChannelError> {
        let round_id = net.next_round_id();
        let mut round = SimBroadcastRound::new(round_id, expected.iter().copied());
        for (from, value) in submissions {
            net.require(&from)?;
            let Some(value) = value else { continue };
            round.submit(from, value.clone())?;
            net.log(Event {
                phase: phase.to_string(),
                kind: ChannelKind::SimultaneousBroadcast,
                sender: Some(from),
                receivers: Receivers::All,
                bits: value.len(),
                payload: Some(value),
                round: Some(round_id),
            });
        }
        let revealed = round.close()?;
        net.log(reveal_marker(phase, round_id));
        Ok(revealed)
    }
}

fn reveal_marker(phase: &str, round_id: u64) -> Event {
    Event {
        phase: phase.to_string(),
        kind: ChannelKind::Reveal,
        sender: None,
        receivers: Receivers::All,
        bits: 0,
        payload: None,
        round: Some(round_id),
    }
}

/// Commitments and openings travel over plain broadcast, logged under
/// `<phase>/commit` and `<phase>/open`. Nonces come from per-party streams
/// separate from all protocol randomness.
#[derive(Debug, Clone)]
pub struct CommitRevealTransport {
    seed: u64,
    nonce_rngs: BTreeMap<PartyId, ChaCha20Rng>,
}

impl CommitRevealTransport {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            nonce_rngs: BTreeMap::new(),
        }
    }

    fn nonce(&mut self, party: PartyId) -> [u8; 32] {
        let seed = self.seed;
        let rng = self.nonce_rngs.entry(party).or_insert_with(|| {
            let mut r = ChaCha20Rng::seed_from_u64(seed);
            r.set_stream((3u64 << 60) | party.stream_id());
            r
        });
        let mut nonce = [0u8; 32];
        rng.fill_bytes(&mut nonce);
        nonce
    }
}

impl SimultaneousBroadcast for CommitRevealTransport {
    fn exchange(
        &mut self,
        net: &mut Network,
        phase: &str,
        expected: &[PartyId],
        submissions: Vec<(PartyId, Option<BitString>)>,
    ) -> Result<BTreeMap<PartyId, BitString>, ChannelError> {
        let round_id = net.next_round_id();
        let mut round = CommitRevealRound::new(round_id, expected.iter().copied());
        let commit_phase = format!("{phase}/commit");
        let open_phase = format!("{phase}/open");

        let mut openings = Vec::new();
        for (from, value) in submissions {
            net.require(&from)?;
            let Some(value) = value else { continue };
            let opening = Opening {
                value,
                nonce: self.nonce(from),
            };
            let c = Commitment::new(round_id, from, &opening);
            round.commit(from, c)?;
            net.broadcast(&commit_phase, from, c.to_bits())?;
            openings.push((from, opening));
        }
        round.commitments_complete()?;

        for (from, opening) in openings {
            net.broadcast(&open_phase, from, opening.to_bits())?;
            round.open(from, opening)?;
        }
        let revealed = round.finish()?;
        net.log(reveal_marker(phase, round_id));
        Ok(revealed)
    }
}

/// Either transport behind one type.
#[derive(Debug, Clone)]
pub enum Transport {
    Memory(MemoryTransport),
    CommitReveal(CommitRevealTransport),
}

impl Transport {
    pub fn new(kind: TransportKind, seed: u64) -> Self {
        match kind {
            TransportKind::Memory => Transport::Memory(MemoryTransport),
            TransportKind::CommitReveal => Transport::CommitReveal(CommitRevealTransport::new(seed)),
        }
    }
}

impl SimultaneousBroadcast for Transport {
    fn exchange(
        &mut self,
        net: &mut Network,
        phase: &str,
        expected: &[PartyId],
        submissions: Vec<(PartyId, Option<BitString>)>,
    ) -> Result<BTreeMap<PartyId, BitString>, ChannelError> {
        match self {
            Transport::Memory(t) => t.exchange(net, phase, expected, submissions),
            Transport::CommitReveal(t) => t.exchange(net, phase, expected, submissions),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        BitString::from_str_bits(s)
    }

    #[test]
    fn two_parties_see_everything_after_completion() {
        let (p1, p2) = (PartyId::voter(1), PartyId::voter(2));
        let mut net = Network::new([p1, p2]);
        let out = MemoryTransport
            .exchange(&mut net, "b", &[p1, p2], vec![(p1, Some(bits("1"))), (p2, Some(bits("0")))])
            .unwrap();
        assert_eq!(out, BTreeMap::from([(p1, bits("1")), (p2, bits("0"))]));
        let kinds: Vec<ChannelKind> = net.transcript().events().iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![ChannelKind::SimultaneousBroadcast, ChannelKind::SimultaneousBroadcast, ChannelKind::Reveal]
        );
    }

    #[test]
    fn rushing_observer_learns_nothing() {
        let (p1, p2, adv) = (PartyId::voter(1), PartyId::voter(2), PartyId::voter(3));
        let mut round = SimBroadcastRound::new(0, [p1, p2, adv]);
        round.submit(p1, bits("1")).unwrap();
        round.submit(p2, bits("0")).unwrap();
        assert!(round.observe(adv).is_none());
        assert_eq!(round.state(), RoundState::Collecting);
        round.submit(adv, bits("1")).unwrap();
        assert_eq!(round.observe(adv).unwrap().len(), 3);
    }

    #[test]
    fn missing_party_aborts() {
        let ps = [PartyId::voter(1), PartyId::voter(2), PartyId::voter(3)];
        let mut net = Network::new(ps);
        let err = MemoryTransport
            .exchange(
                &mut net,
                "b",
                &ps,
                vec![(ps[0], Some(bits("1"))), (ps[1], Some(bits("1"))), (ps[2], None)],
            )
            .unwrap_err();
        assert_eq!(err, ChannelError::MissingParticipant { round: 0, party: ps[2] });
    }

    #[test]
    fn double_submission_names_offender() {
        let p = PartyId::voter(1);
        let mut round = SimBroadcastRound::new(0, [p, PartyId::voter(2)]);
        round.submit(p, bits("1")).unwrap();
        assert_eq!(round.submit(p, bits("0")), Err(ChannelError::DoubleSubmission(p)));
    }

    #[test]
    fn commit_reveal_matches_memory() {
        let ps = [PartyId::authority(1), PartyId::authority(2), PartyId::authority(3)];
        let subs = || -> Vec<(PartyId, Option<BitString>)> {
            vec![(ps[0], Some(bits("1011"))), (ps[1], Some(bits("0000"))), (ps[2], Some(bits("1110")))]
        };
        let mut n1 = Network::new(ps);
        let mut n2 = Network::new(ps);
        let a = MemoryTransport.exchange(&mut n1, "b", &ps, subs()).unwrap();
        let b = CommitRevealTransport::new(5).exchange(&mut n2, "b", &ps, subs()).unwrap();
        assert_eq!(a, b);

        let ev = n2.transcript().events();
        let commits: Vec<_> = ev.iter().filter(|e| e.phase == "b/commit").collect();
        let opens: Vec<_> = ev.iter().filter(|e| e.phase == "b/open").collect();
        assert_eq!(commits.len(), 3);
        assert_eq!(opens.len(), 3);
        assert!(commits.iter().all(|e| e.bits == DIGEST_BITS && e.kind == ChannelKind::Broadcast));
        assert!(opens.iter().all(|e| e.bits == 4 + NONCE_BITS));
        // Every commitment precedes every opening.
        let last_commit = ev.iter().rposition(|e| e.phase == "b/commit").unwrap();
        let first_open = ev.iter().position(|e| e.phase == "b/open").unwrap();
        assert!(last_commit < first_open);
    }

    #[test]
    fn bad_opening_names_offender() {
        let (p1, p2) = (PartyId::authority(1), PartyId::authority(2));
        let mut round = CommitRevealRound::new(7, [p1, p2]);
        let honest = Opening { value: bits("1010"), nonce: [1; 32] };
        let cheat = Opening { value: bits("0110"), nonce: [2; 32] };
        round.commit(p1, Commitment::new(7, p1, &honest)).unwrap();
        round.commit(p2, Commitment::new(7, p2, &cheat)).unwrap();
        round.open(p1, honest).unwrap();
        let swapped = Opening { value: bits("0111"), nonce: [2; 32] };
        assert_eq!(round.open(p2, swapped), Err(ChannelError::BadOpening(p2)));
    }

    #[test]
    fn opening_before_all_commitments_is_refused() {
        let (p1, p2) = (PartyId::authority(1), PartyId::authority(2));
        let mut round = CommitRevealRound::new(0, [p1, p2]);
        let o = Opening { value: bits("1"), nonce: [0; 32] };
        round.commit(p1, Commitment::new(0, p1, &o)).unwrap();
        assert_eq!(
            round.open(p1, o),
            Err(ChannelError::MissingParticipant { round: 0, party: p2 })
        );
    }

    #[test]
    fn commitment_binds_every_bit_and_the_context() {
        let p = PartyId::authority(1);
        let o = Opening { value: bits("1100101"), nonce: [9; 32] };
        let c = Commitment::new(3, p, &o);
        for i in 0..o.value.len() {
            let mut v = o.value.clone();
            v.flip(i);
            assert!(!c.verify(3, p, &Opening { value: v, nonce: o.nonce }));
        }
        assert!(!c.verify(4, p, &o));
        assert!(!c.verify(3, PartyId::authority(2), &o));
        assert!(c.verify(3, p, &o));
    }
}
