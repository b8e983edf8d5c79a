use std::collections::BTreeMap;

use super::announce::{decode_announcement, encode_announcement};
use super::{Ballot, Halt, ProtocolKind, RunOutcome, Session, Tallied};
use crate::adversary::{Action, AdversarySpec};
use crate::bits::BitString;
use crate::channels::PartyId;
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::primitives::{build_vote_matrix, share_bits};
use crate::tally::{aggregate_parities, finalize_tally, TallyResult};

pub const PHASE_CAST: &str = "cast";
pub const PHASE_BROADCAST: &str = "broadcast";
pub const PHASE_ANNOUNCE: &str = "announce";

/// Voters share their vote matrices among the `r` authorities. The
/// authorities broadcast XOR-ed shares simultaneously, each computes the
/// tally from the public parities and all of them announce it. Differing
/// announcements fail the run.
pub fn run_protocol2(
    cfg: &ProtocolConfig,
    ballots: &[Ballot],
    strategies: &[AdversarySpec],
    seed: u64,
) -> Result<RunOutcome> {
    let mut session = Session::new(cfg, ballots, strategies, seed, true)?;
    let body = body(&mut session);
    session.finish(ProtocolKind::Authority, body)
}

fn body(s: &mut Session) -> std::result::Result<Tallied, Halt> {
    let cfg = s.cfg;
    let (n, r) = (cfg.voters, cfg.authorities);
    let authorities = s.authorities();

    // Phase A
    for v in s.voters() {
        let choice = s.choices[&v];
        let honest = build_vote_matrix(choice, &cfg, s.rng(v))?;
        let Action::Cast(vote) = s.act(v, Action::Cast(honest), None, n)? else {
            unreachable!()
        };
        let shares = share_bits(&vote.to_bits(), r, s.rng(v))?;
        let Action::Share(shares) = s.act(v, Action::Share(shares), None, n)? else {
            unreachable!()
        };
        if shares.len() != r || shares.iter().any(|sh| sh.len() != cfg.vote_bits()) {
            return Err(Error::config(format!("{v} produced malformed shares")).into());
        }
        for (a, share) in authorities.iter().zip(shares) {
            s.net.send_private(PHASE_CAST, v, *a, share)?;
        }
    }

    let mut held = BTreeMap::new();
    for &a in &authorities {
        let mut q = BitString::zeros(cfg.vote_bits());
        for env in s.net.take_private(a, PHASE_CAST)? {
            q ^= &env.payload;
        }
        held.insert(a, q);
    }
    authority_tally(s, held, n, Vec::new())
}

/// Phases B and C with authorities: each authority's XOR of held shares goes
/// into one simultaneous broadcast, every authority decodes the public
/// parities and the tallies are announced in a second round.
pub(crate) fn authority_tally(
    s: &mut Session,
    held: BTreeMap<PartyId, BitString>,
    counted: usize,
    revoked: Vec<PartyId>,
) -> std::result::Result<Tallied, Halt> {
    let cfg = s.cfg;
    let n = cfg.voters;
    let m = cfg.effective_candidates();
    let authorities = s.authorities();

    let mut submissions = Vec::with_capacity(authorities.len());
    for (a, q) in held {
        let Action::ParitySubmit(q) = s.act(a, Action::ParitySubmit(Some(q)), None, counted)? else {
            unreachable!()
        };
        submissions.push((a, q));
    }
    let revealed = s.exchange(PHASE_BROADCAST, &authorities, submissions)?;
    let contributions: Vec<BitString> = revealed.into_values().collect();
    let acc = aggregate_parities(&contributions, authorities.len(), m, cfg.positions())?;
    let result = finalize_tally(&acc, counted, n);

    let mut announcements = Vec::with_capacity(authorities.len());
    for &a in &authorities {
        let honest = Action::TallyAnnounce(result.counts.clone());
        let Action::TallyAnnounce(said) = s.act(a, honest, None, counted)? else {
            unreachable!()
        };
        announcements.push((a, Some(encode_announcement(said.as_deref(), counted, m))));
    }
    let heard = s.exchange(PHASE_ANNOUNCE, &authorities, announcements)?;
    let decoded: Vec<Option<Vec<usize>>> = heard
        .values()
        .map(|b| decode_announcement(b, counted, m))
        .collect();
    if decoded.windows(2).any(|w| w[0] != w[1]) {
        let said: Vec<String> = heard
            .keys()
            .zip(&decoded)
            .map(|(a, d)| match d {
                Some(c) => format!("{a}={c:?}"),
                None => format!("{a}=FAIL"),
            })
            .collect();
        return Err(Halt::Disagreement(
            format!("announcements differ: {}", said.join(" ")),
            revoked,
        ));
    }
    let agreed = decoded.into_iter().next().flatten();
    let result = match agreed {
        Some(counts) => TallyResult {
            counts: Some(counts),
            failure: None,
            revoked: Vec::new(),
        },
        // Everyone announced failure; keep the locally computed reason.
        None if result.failed() => result,
        None => TallyResult {
            counts: None,
            failure: None,
            revoked: Vec::new(),
        },
    };
    Ok(Tallied::from_result(result, acc.sigma, revoked))
}
