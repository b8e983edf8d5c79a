//! Misbehavior strategies, applied at typed hook points.
//!
//! Every message a party emits passes through one hook. An honest party
//! returns the honest action unchanged; a corrupted one may replace it. The
//! only information a strategy receives besides the honest action is
//! [`ObservedState`], which exposes the transcript as its coalition is
//! entitled to see it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};

use crate::bits::BitString;
use crate::channels::{PartyId, Role, Transcript, ViewEvent};
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::primitives::{build_vote_matrix, mark_row, VoteMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Honest,
    /// Marks `ns` positions in two candidate rows.
    DoubleVoter,
    /// Every vote bit is an independent Bernoulli(`rate`) draw.
    Noise { rate: f64 },
    /// Marks `count` positions (instead of `ns`) in the chosen row.
    Overweight { count: usize },
    /// Flips each submitted parity bit with probability `rate`.
    ParityFlipper { rate: f64 },
    /// Reports the complement of the opened copy set to the voter.
    Equivocator { target: Option<PartyId> },
    /// `s` correct copies plus `s` identical malformed ones.
    UnequalCopier,
    /// `2s` independently built correct votes for the same candidate.
    FreshCopier,
    MaliciousRevoker { target: PartyId },
    /// Contributes constant bits to the common randomness.
    CoinBiaser { value: bool },
    /// Announces a tally different from the one it computed.
    FalseAnnouncer,
    /// Flips every equality-test contribution.
    EqualityFlipper,
    /// Withholds every simultaneous-broadcast submission.
    Silent,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Honest => "honest",
            Strategy::DoubleVoter => "double-voter",
            Strategy::Noise { .. } => "noise",
            Strategy::Overweight { .. } => "overweight",
            Strategy::ParityFlipper { .. } => "parity-flipper",
            Strategy::Equivocator { .. } => "equivocator",
            Strategy::UnequalCopier => "unequal-copier",
            Strategy::FreshCopier => "fresh-copier",
            Strategy::MaliciousRevoker { .. } => "malicious-revoker",
            Strategy::CoinBiaser { .. } => "coin-biaser",
            Strategy::FalseAnnouncer => "false-announcer",
            Strategy::EqualityFlipper => "equality-flipper",
            Strategy::Silent => "silent",
        }
    }

    pub fn applies_to(&self, role: Role) -> bool {
        use Strategy::*;
        match self {
            Honest | ParityFlipper { .. } | Silent => true,
            DoubleVoter | Noise { .. } | Overweight { .. } | UnequalCopier | FreshCopier => role == Role::Voter,
            Equivocator { .. } | MaliciousRevoker { .. } | CoinBiaser { .. } | FalseAnnouncer | EqualityFlipper => {
                role == Role::Authority
            }
        }
    }

    pub fn is_honest(&self) -> bool {
        matches!(self, Strategy::Honest)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversarySpec {
    pub party: PartyId,
    pub strategy: Strategy,
    /// Parties naming the same coalition share one observed-state view.
    pub coalition: Option<String>,
}

impl AdversarySpec {
    pub fn new(party: PartyId, strategy: Strategy) -> Result<Self> {
        let spec = Self {
            party,
            strategy,
            coalition: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn in_coalition(mut self, name: impl Into<String>) -> Self {
        self.coalition = Some(name.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.strategy.applies_to(self.party.role) {
            return Err(Error::config(format!(
                "strategy {} cannot be played by {}",
                self.strategy.name(),
                self.party
            )));
        }
        match &self.strategy {
            Strategy::Noise { rate } | Strategy::ParityFlipper { rate } if !(0.0..=1.0).contains(rate) => {
                Err(Error::config(format!("rate {rate} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for AdversarySpec {
    type Err = Error;

    /// `party=<role>:<index> strategy=<name> [key=value ...]`
    fn from_str(s: &str) -> Result<Self> {
        let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
        for tok in s.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::config(format!("expected key=value, got `{tok}`")))?;
            if kv.insert(k, v).is_some() {
                return Err(Error::config(format!("duplicate key `{k}`")));
            }
        }
        let party: PartyId = kv
            .remove("party")
            .ok_or_else(|| Error::config("adversary spec needs party=<role>:<index>"))?
            .parse()?;
        let name = kv
            .remove("strategy")
            .ok_or_else(|| Error::config("adversary spec needs strategy=<name>"))?;
        let coalition = kv.remove("coalition").map(str::to_string);

        let float = |kv: &mut BTreeMap<&str, &str>, key: &str, default: f64| -> Result<f64> {
            kv.remove(key).map_or(Ok(default), |v| {
                v.parse().map_err(|_| Error::config(format!("bad {key} `{v}`")))
            })
        };
        let strategy = match name {
            "honest" => Strategy::Honest,
            "double-voter" => Strategy::DoubleVoter,
            "noise" => Strategy::Noise {
                rate: float(&mut kv, "rate", 0.5)?,
            },
            "overweight" => {
                let count = kv
                    .remove("count")
                    .ok_or_else(|| Error::config("overweight needs count=<ones>"))?;
                Strategy::Overweight {
                    count: count.parse().map_err(|_| Error::config(format!("bad count `{count}`")))?,
                }
            }
            "parity-flipper" => Strategy::ParityFlipper {
                rate: float(&mut kv, "rate", 1.0)?,
            },
            "equivocator" => Strategy::Equivocator {
                target: kv.remove("target").map(str::parse).transpose()?,
            },
            "unequal-copier" => Strategy::UnequalCopier,
            "fresh-copier" => Strategy::FreshCopier,
            "malicious-revoker" => Strategy::MaliciousRevoker {
                target: kv
                    .remove("target")
                    .ok_or_else(|| Error::config("malicious-revoker needs target=voter:<index>"))?
                    .parse()?,
            },
            "coin-biaser" => Strategy::CoinBiaser {
                value: match kv.remove("value").unwrap_or("0") {
                    "0" => false,
                    "1" => true,
                    v => return Err(Error::config(format!("coin-biaser value must be 0 or 1, got `{v}`"))),
                },
            },
            "false-announcer" => Strategy::FalseAnnouncer,
            "equality-flipper" => Strategy::EqualityFlipper,
            "silent" => Strategy::Silent,
            other => return Err(Error::config(format!("unknown strategy `{other}`"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::config(format!("unexpected key `{k}` for strategy {name}")));
        }
        let spec = AdversarySpec {
            party,
            strategy,
            coalition,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "party={} strategy={}", self.party, self.strategy.name())?;
        match &self.strategy {
            Strategy::Noise { rate } | Strategy::ParityFlipper { rate } => write!(f, " rate={rate}")?,
            Strategy::Overweight { count } => write!(f, " count={count}")?,
            Strategy::Equivocator { target: Some(t) } | Strategy::MaliciousRevoker { target: t } => {
                write!(f, " target={t}")?
            }
            Strategy::CoinBiaser { value } => write!(f, " value={}", u8::from(*value))?,
            _ => {}
        }
        if let Some(c) = &self.coalition {
            write!(f, " coalition={c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HookPoint {
    Cast,
    Share,
    ParitySubmit,
    Copy,
    OpenReport,
    EqualitySubmit,
    TallyAnnounce,
    RevokeVote,
    /// Contribution to the common random bits.
    Coin,
}

/// What a party is about to emit at a hook. `None` submissions withhold the
/// party's input from a simultaneous broadcast.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Cast(VoteMatrix),
    Share(Vec<BitString>),
    ParitySubmit(Option<BitString>),
    Copy(Vec<VoteMatrix>),
    OpenReport(BTreeSet<usize>),
    EqualitySubmit(Option<BitString>),
    /// `None` announces failure.
    TallyAnnounce(Option<Vec<usize>>),
    RevokeVote(BTreeSet<PartyId>),
    Coin(Option<BitString>),
}

impl Action {
    pub fn hook(&self) -> HookPoint {
        match self {
            Action::Cast(_) => HookPoint::Cast,
            Action::Share(_) => HookPoint::Share,
            Action::ParitySubmit(_) => HookPoint::ParitySubmit,
            Action::Copy(_) => HookPoint::Copy,
            Action::OpenReport(_) => HookPoint::OpenReport,
            Action::EqualitySubmit(_) => HookPoint::EqualitySubmit,
            Action::TallyAnnounce(_) => HookPoint::TallyAnnounce,
            Action::RevokeVote(_) => HookPoint::RevokeVote,
            Action::Coin(_) => HookPoint::Coin,
        }
    }
}

/// Public parameters of the hook invocation.
#[derive(Debug, Clone, Copy)]
pub struct HookContext<'a> {
    pub cfg: &'a ProtocolConfig,
    /// The acting voter's ballot (1-based), at voter hooks.
    pub choice: Option<usize>,
    /// The voter a per-voter authority action concerns.
    pub about: Option<PartyId>,
    /// Ballots currently counted, at tally-announce.
    pub counted_voters: usize,
}

impl<'a> HookContext<'a> {
    pub fn new(cfg: &'a ProtocolConfig) -> Self {
        Self {
            cfg,
            choice: None,
            about: None,
            counted_voters: cfg.voters,
        }
    }
}

/// The transcript as seen by a coalition: metadata of every message, payloads
/// only of messages addressed to (or sent by) a member, plain broadcasts and
/// revealed simultaneous-broadcast rounds.
#[derive(Debug, Clone, Copy)]
pub struct ObservedState<'a> {
    coalition: &'a [PartyId],
    transcript: &'a Transcript,
}

impl<'a> ObservedState<'a> {
    pub fn new(coalition: &'a [PartyId], transcript: &'a Transcript) -> Self {
        Self { coalition, transcript }
    }

    pub fn coalition(&self) -> &[PartyId] {
        self.coalition
    }

    pub fn events(&self) -> Vec<ViewEvent> {
        self.transcript.view_for(self.coalition)
    }
}

/// Runs `spec`'s strategy at `hook`. Strategies leave hooks they do not act
/// on untouched.
pub fn apply_strategy(
    hook: HookPoint,
    honest: Action,
    spec: &AdversarySpec,
    ctx: &HookContext<'_>,
    _observed: &ObservedState<'_>,
    rng: &mut dyn RngCore,
) -> Result<Action> {
    if honest.hook() != hook {
        return Err(Error::config(format!(
            "hook {hook:?} invoked with a {:?} action",
            honest.hook()
        )));
    }
    spec.validate()?;
    let cfg = ctx.cfg;
    let m = cfg.effective_candidates();
    Ok(match (&spec.strategy, honest) {
        (Strategy::Honest, a) => a,

        (Strategy::DoubleVoter, Action::Cast(vote)) => {
            if m < 2 {
                return Err(Error::config("double-voter needs at least two candidates"));
            }
            let choice = ctx.choice.unwrap_or(1);
            let mut v = vote;
            mark_row(&mut v, choice % m, cfg.marked(), rng);
            Action::Cast(v)
        }
        (Strategy::Noise { rate }, Action::Cast(_)) => {
            let rows = (0..m)
                .map(|_| (0..cfg.positions()).map(|_| rng.gen_bool(*rate)).collect())
                .collect();
            Action::Cast(VoteMatrix::from_rows(rows)?)
        }
        (Strategy::Overweight { count }, Action::Cast(_)) => {
            let mut v = VoteMatrix::zeros(m, cfg.positions());
            mark_row(&mut v, ctx.choice.unwrap_or(1) - 1, *count, rng);
            Action::Cast(v)
        }

        (Strategy::ParityFlipper { rate }, Action::ParitySubmit(Some(mut q))) => {
            for i in 0..q.len() {
                if *rate >= 1.0 || rng.gen_bool(*rate) {
                    q.flip(i);
                }
            }
            Action::ParitySubmit(Some(q))
        }

        (Strategy::UnequalCopier, Action::Copy(copies)) => {
            let s = copies.len() / 2;
            let choice = ctx.choice.unwrap_or(1);
            let correct = build_vote_matrix(choice, cfg, rng)?;
            let mut bad = correct.clone();
            if m >= 2 {
                mark_row(&mut bad, choice % m, cfg.marked(), rng);
            } else {
                // A single candidate row with one extra mark; ns < n²s always.
                let pos = (0..cfg.positions()).find(|&j| !bad.row(0).get(j)).unwrap();
                bad.row_mut(0).set(pos, true);
            }
            let mut out = vec![correct; s];
            out.extend(std::iter::repeat_n(bad, copies.len() - s));
            Action::Copy(out)
        }
        (Strategy::FreshCopier, Action::Copy(copies)) => {
            let choice = ctx.choice.unwrap_or(1);
            let out = (0..copies.len())
                .map(|_| build_vote_matrix(choice, cfg, rng))
                .collect::<Result<Vec<_>>>()?;
            Action::Copy(out)
        }

        (Strategy::Equivocator { target }, Action::OpenReport(opened))
            if target.is_none() || *target == ctx.about =>
        {
            let total = 2 * cfg.security;
            Action::OpenReport((0..total).filter(|i| !opened.contains(i)).collect())
        }

        (Strategy::MaliciousRevoker { target }, Action::RevokeVote(mut set)) => {
            set.insert(*target);
            Action::RevokeVote(set)
        }

        (Strategy::CoinBiaser { value }, Action::Coin(Some(bits))) => {
            Action::Coin(Some(bits.iter().map(|_| *value).collect()))
        }

        (Strategy::FalseAnnouncer, Action::TallyAnnounce(announced)) => {
            let counted = ctx.counted_voters;
            let lie = match announced {
                Some(mut counts) if m >= 2 || counts.iter().sum::<usize>() == 0 => {
                    if let Some(k) = counts.iter().position(|&c| c > 0) {
                        counts[k] -= 1;
                        counts[(k + 1) % m] += 1;
                        if m < 2 {
                            None
                        } else {
                            Some(counts)
                        }
                    } else {
                        None
                    }
                }
                Some(_) => None,
                None => {
                    let mut counts = vec![0; m];
                    counts[0] = counted;
                    Some(counts)
                }
            };
            Action::TallyAnnounce(lie)
        }

        (Strategy::EqualityFlipper, Action::EqualitySubmit(Some(c))) => {
            Action::EqualitySubmit(Some(c.iter().map(|b| !b).collect()))
        }

        (Strategy::Silent, Action::ParitySubmit(_)) => Action::ParitySubmit(None),
        (Strategy::Silent, Action::EqualitySubmit(_)) => Action::EqualitySubmit(None),
        (Strategy::Silent, Action::Coin(_)) => Action::Coin(None),

        (_, a) => a,
    })
}
