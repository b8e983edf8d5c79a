//! The three voting protocols as message-passing runs over one [`Network`]
//! session.
//!
//! * [`run_protocol1`]: voters only; each voter shares its vote among all
//!   voters and everyone broadcasts parities.
//! * [`run_protocol2`]: votes are shared among `r` authorities, which
//!   broadcast parities and announce the tally.
//! * [`run_protocol3`]: as protocol 2, preceded by cut-and-choose
//!   verification of every vote; malformed ballots are revoked.

mod announce;
mod authority;
mod basic;
mod verified;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{apply_strategy, Action, AdversarySpec, HookContext, ObservedState};
use crate::bits::BitString;
use crate::channels::{accounting_report, AccountingReport, Network, PartyId, SimultaneousBroadcast, Transcript, Transport};
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::tally::{TallyFailure, TallyResult};

pub use announce::{announcement_bits, decode_announcement, encode_announcement};
pub use authority::run_protocol2;
pub use basic::run_protocol1;
pub use verified::{run_protocol3, CHUNKS_PER_VOTER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    /// Voters only.
    Basic,
    /// Voters and authorities.
    Authority,
    /// Authorities with cut-and-choose verification.
    Verified,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Basic, ProtocolKind::Authority, ProtocolKind::Verified];
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Basic => "basic",
            ProtocolKind::Authority => "authority",
            ProtocolKind::Verified => "verified",
        })
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(ProtocolKind::Basic),
            "authority" => Ok(ProtocolKind::Authority),
            "verified" => Ok(ProtocolKind::Verified),
            other => Err(Error::config(format!("unknown protocol `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ballot {
    pub voter: PartyId,
    /// Candidate index, 1-based.
    pub choice: usize,
}

impl Ballot {
    pub fn new(voter: usize, choice: usize) -> Self {
        Self {
            voter: PartyId::voter(voter),
            choice,
        }
    }
}

/// Ballot `i` goes to voter `i + 1`.
pub fn ballots_from_choices(choices: &[usize]) -> Vec<Ballot> {
    choices
        .iter()
        .enumerate()
        .map(|(i, &c)| Ballot::new(i + 1, c))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureCause {
    /// Some σ[k] fell in no decode window.
    NoDecode,
    /// Decoded counts do not add up to the number of counted ballots.
    SumMismatch,
    /// Authorities announced different tallies or revocation sets.
    Disagreement,
    /// A simultaneous broadcast round could not complete.
    BroadcastAbort,
}

impl fmt::Display for FailureCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureCause::NoDecode => "no-decode",
            FailureCause::SumMismatch => "sum-mismatch",
            FailureCause::Disagreement => "disagreement",
            FailureCause::BroadcastAbort => "broadcast-abort",
        })
    }
}

impl From<TallyFailure> for FailureCause {
    fn from(f: TallyFailure) -> Self {
        match f {
            TallyFailure::NoDecode { .. } => FailureCause::NoDecode,
            TallyFailure::SumMismatch { .. } => FailureCause::SumMismatch,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub protocol: ProtocolKind,
    pub config: ProtocolConfig,
    pub seed: u64,
    /// Counts for the `m` real candidates; the dummy candidate is split off
    /// into [`RunOutcome::dummy`].
    pub result: TallyResult,
    pub failure_cause: Option<FailureCause>,
    pub failure_detail: Option<String>,
    /// Ballots of these voters were excluded from the tally. After a
    /// disagreement about revocations this lists every proposed revocation.
    pub revoked: Vec<PartyId>,
    /// Ballots counted for the dummy candidate, when it is enabled.
    pub dummy: Option<usize>,
    /// Public odd-parity rate per candidate row (empty if never computed).
    pub sigma: Vec<f64>,
    pub transcript: Transcript,
}

impl RunOutcome {
    pub fn failed(&self) -> bool {
        self.failure_cause.is_some()
    }

    pub fn counts(&self) -> Option<&[usize]> {
        self.result.counts.as_deref()
    }

    pub fn accounting(&self) -> AccountingReport {
        accounting_report(&self.transcript)
    }

    /// The serialized record: protocol, config, tally (or `"FAIL"`), failure
    /// cause, revoked voters, seed and the accounting rows.
    pub fn to_record(&self) -> RunRecord {
        RunRecord {
            protocol: self.protocol,
            config: self.config,
            tally: match &self.result.counts {
                Some(c) => TallyField::Counts(c.clone()),
                None => TallyField::Fail(FailMarker::Fail),
            },
            failure_cause: self.failure_cause,
            revoked: self.revoked.clone(),
            seed: self.seed,
            dummy: self.dummy,
            sigma: self.sigma.clone(),
            accounting: self.accounting(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailMarker {
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TallyField {
    Counts(Vec<usize>),
    Fail(FailMarker),
}

impl TallyField {
    pub fn counts(&self) -> Option<&[usize]> {
        match self {
            TallyField::Counts(c) => Some(c),
            TallyField::Fail(_) => None,
        }
    }
}

/// One JSON-lines record per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub protocol: ProtocolKind,
    pub config: ProtocolConfig,
    pub tally: TallyField,
    pub failure_cause: Option<FailureCause>,
    pub revoked: Vec<PartyId>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dummy: Option<usize>,
    #[serde(default)]
    pub sigma: Vec<f64>,
    pub accounting: AccountingReport,
}

pub fn run_protocol(
    kind: ProtocolKind,
    cfg: &ProtocolConfig,
    ballots: &[Ballot],
    strategies: &[AdversarySpec],
    seed: u64,
) -> Result<RunOutcome> {
    match kind {
        ProtocolKind::Basic => run_protocol1(cfg, ballots, strategies, seed),
        ProtocolKind::Authority => run_protocol2(cfg, ballots, strategies, seed),
        ProtocolKind::Verified => run_protocol3(cfg, ballots, strategies, seed),
    }
}

/// Validated strategy table with coalition membership.
#[derive(Debug, Clone, Default)]
pub(crate) struct Adversaries {
    specs: BTreeMap<PartyId, AdversarySpec>,
    coalitions: BTreeMap<PartyId, Vec<PartyId>>,
}

impl Adversaries {
    pub(crate) fn new(specs: &[AdversarySpec], parties: &BTreeSet<PartyId>) -> Result<Self> {
        let mut table = BTreeMap::new();
        for spec in specs {
            spec.validate()?;
            if !parties.contains(&spec.party) {
                return Err(Error::config(format!("{} does not take part in this protocol", spec.party)));
            }
            if table.insert(spec.party, spec.clone()).is_some() {
                return Err(Error::config(format!("two strategies given for {}", spec.party)));
            }
        }
        let coalitions = table
            .values()
            .map(|s| {
                let members = match &s.coalition {
                    Some(name) => table
                        .values()
                        .filter(|o| o.coalition.as_deref() == Some(name.as_str()))
                        .map(|o| o.party)
                        .collect(),
                    None => vec![s.party],
                };
                (s.party, members)
            })
            .collect();
        Ok(Self {
            specs: table,
            coalitions,
        })
    }
}

/// Early exits out of a protocol body.
pub(crate) enum Halt {
    Abort(crate::channels::ChannelError),
    /// Randomness generation never converged.
    Stalled(String),
    /// Detail, plus the revocations known (or proposed) at that point.
    Disagreement(String, Vec<PartyId>),
    Fatal(Error),
}

impl From<crate::channels::ChannelError> for Halt {
    fn from(e: crate::channels::ChannelError) -> Self {
        Halt::Abort(e)
    }
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        match e {
            Error::Channel(c) => Halt::Abort(c),
            other => Halt::Fatal(other),
        }
    }
}

/// A single run: the network, the transport, per-party randomness and the
/// strategy table.
pub(crate) struct Session {
    pub cfg: ProtocolConfig,
    pub seed: u64,
    pub net: Network,
    pub transport: Transport,
    pub choices: BTreeMap<PartyId, usize>,
    adversaries: Adversaries,
    rngs: BTreeMap<PartyId, ChaCha20Rng>,
    adv_rngs: BTreeMap<PartyId, ChaCha20Rng>,
}

pub(crate) fn party_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

impl Session {
    pub(crate) fn new(
        cfg: &ProtocolConfig,
        ballots: &[Ballot],
        strategies: &[AdversarySpec],
        seed: u64,
        with_authorities: bool,
    ) -> Result<Self> {
        cfg.validate()?;
        let voters: Vec<PartyId> = (1..=cfg.voters).map(PartyId::voter).collect();
        let mut parties: BTreeSet<PartyId> = voters.iter().copied().collect();
        if with_authorities {
            parties.extend((1..=cfg.authorities).map(PartyId::authority));
        }
        if ballots.len() != cfg.voters {
            return Err(Error::InvalidBallot(format!(
                "{} ballots for {} voters",
                ballots.len(),
                cfg.voters
            )));
        }
        let mut choices = BTreeMap::new();
        for b in ballots {
            if b.voter.role != crate::channels::Role::Voter || !(1..=cfg.voters).contains(&b.voter.index) {
                return Err(Error::InvalidBallot(format!("no such voter {}", b.voter)));
            }
            if !(1..=cfg.effective_candidates()).contains(&b.choice) {
                return Err(Error::InvalidBallot(format!(
                    "{} chose {}; candidates are 1..={}",
                    b.voter,
                    b.choice,
                    cfg.effective_candidates()
                )));
            }
            if choices.insert(b.voter, b.choice).is_some() {
                return Err(Error::InvalidBallot(format!("{} has two ballots", b.voter)));
            }
        }
        let adversaries = Adversaries::new(strategies, &parties)?;
        Ok(Self {
            cfg: *cfg,
            seed,
            net: Network::new(parties),
            transport: Transport::new(cfg.transport, seed),
            choices,
            adversaries,
            rngs: BTreeMap::new(),
            adv_rngs: BTreeMap::new(),
        })
    }

    pub(crate) fn voters(&self) -> Vec<PartyId> {
        (1..=self.cfg.voters).map(PartyId::voter).collect()
    }

    pub(crate) fn authorities(&self) -> Vec<PartyId> {
        (1..=self.cfg.authorities).map(PartyId::authority).collect()
    }

    pub(crate) fn rng(&mut self, party: PartyId) -> &mut ChaCha20Rng {
        let seed = self.seed;
        self.rngs
            .entry(party)
            .or_insert_with(|| party_rng(seed, party.stream_id()))
    }

    /// Passes `honest` through `party`'s strategy, if it has one.
    pub(crate) fn act(
        &mut self,
        party: PartyId,
        honest: Action,
        about: Option<PartyId>,
        counted_voters: usize,
    ) -> Result<Action> {
        let Some(spec) = self.adversaries.specs.get(&party) else {
            return Ok(honest);
        };
        let ctx = HookContext {
            cfg: &self.cfg,
            choice: self.choices.get(&party).copied(),
            about,
            counted_voters,
        };
        let observed = ObservedState::new(&self.adversaries.coalitions[&party], self.net.transcript());
        let seed = self.seed;
        let rng = self
            .adv_rngs
            .entry(party)
            .or_insert_with(|| party_rng(seed, (2u64 << 60) | party.stream_id()));
        apply_strategy(honest.hook(), honest, spec, &ctx, &observed, rng)
    }

    pub(crate) fn exchange(
        &mut self,
        phase: &str,
        expected: &[PartyId],
        submissions: Vec<(PartyId, Option<BitString>)>,
    ) -> Result<BTreeMap<PartyId, BitString>, Halt> {
        Ok(self.transport.exchange(&mut self.net, phase, expected, submissions)?)
    }

    /// Wraps up a run. `tally` carries counts over all effective candidates.
    pub(crate) fn finish(
        self,
        protocol: ProtocolKind,
        body: std::result::Result<Tallied, Halt>,
    ) -> Result<RunOutcome> {
        let cfg = self.cfg;
        let mut out = RunOutcome {
            protocol,
            config: cfg,
            seed: self.seed,
            result: TallyResult {
                counts: None,
                failure: None,
                revoked: Vec::new(),
            },
            failure_cause: None,
            failure_detail: None,
            revoked: Vec::new(),
            dummy: None,
            sigma: Vec::new(),
            transcript: Transcript::new(),
        };
        match body {
            Ok(t) => {
                out.sigma = t.sigma;
                out.revoked = t.revoked.clone();
                out.result.revoked = t.revoked;
                match t.outcome {
                    Ok(mut counts) => {
                        if cfg.dummy_candidate {
                            out.dummy = counts.pop();
                        }
                        out.result.counts = Some(counts);
                    }
                    Err((cause, failure, detail)) => {
                        out.result.failure = failure;
                        out.failure_cause = Some(cause);
                        out.failure_detail = Some(detail);
                    }
                }
            }
            Err(Halt::Abort(e)) => {
                out.failure_cause = Some(FailureCause::BroadcastAbort);
                out.failure_detail = Some(e.to_string());
            }
            Err(Halt::Stalled(detail)) => {
                out.failure_cause = Some(FailureCause::BroadcastAbort);
                out.failure_detail = Some(detail);
            }
            Err(Halt::Disagreement(detail, revoked)) => {
                out.failure_cause = Some(FailureCause::Disagreement);
                out.failure_detail = Some(detail);
                out.result.revoked = revoked.clone();
                out.revoked = revoked;
            }
            Err(Halt::Fatal(e)) => return Err(e),
        }
        out.transcript = self.net.into_transcript();
        Ok(out)
    }
}

/// What a protocol body produced once it got to the tally.
pub(crate) struct Tallied {
    pub outcome: std::result::Result<Vec<usize>, (FailureCause, Option<TallyFailure>, String)>,
    pub sigma: Vec<f64>,
    pub revoked: Vec<PartyId>,
}

impl Tallied {
    pub(crate) fn from_result(result: TallyResult, sigma: Vec<f64>, revoked: Vec<PartyId>) -> Self {
        let outcome = match (result.counts, result.failure) {
            (Some(c), _) => Ok(c),
            (None, f) => {
                let cause = f.map_or(FailureCause::NoDecode, FailureCause::from);
                let detail = match f {
                    Some(TallyFailure::NoDecode { candidate }) => format!("candidate {candidate} did not decode"),
                    Some(TallyFailure::SumMismatch { sum, expected }) => {
                        format!("decoded counts sum to {sum}, expected {expected}")
                    }
                    None => "tally failed".to_string(),
                };
                Err((cause, f, detail))
            }
        };
        Self {
            outcome,
            sigma,
            revoked,
        }
    }
}
