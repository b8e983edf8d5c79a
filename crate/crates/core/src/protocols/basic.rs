use std::collections::BTreeMap;

use super::{Ballot, Halt, ProtocolKind, RunOutcome, Session, Tallied};
use crate::adversary::{Action, AdversarySpec};
use crate::bits::BitString;
use crate::channels::PartyId;
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::primitives::{build_vote_matrix, share_bits};
use crate::tally::{aggregate_parities, finalize_tally};

pub const PHASE_CAST: &str = "cast";
pub const PHASE_BROADCAST: &str = "broadcast";

/// Voters only. Phase A: every voter splits each bit of its vote matrix into
/// `n` XOR shares and sends share `ℓ` to voter `ℓ`. Phase B: every voter
/// XORs the shares it holds and submits the result to one simultaneous
/// broadcast. Phase C: the public parities are decoded and checked against
/// `n`.
pub fn run_protocol1(
    cfg: &ProtocolConfig,
    ballots: &[Ballot],
    strategies: &[AdversarySpec],
    seed: u64,
) -> Result<RunOutcome> {
    let mut session = Session::new(cfg, ballots, strategies, seed, false)?;
    let body = body(&mut session);
    session.finish(ProtocolKind::Basic, body)
}

fn body(s: &mut Session) -> std::result::Result<Tallied, Halt> {
    let cfg = s.cfg;
    let n = cfg.voters;
    let m = cfg.effective_candidates();
    let voters = s.voters();

    // Phase A. The share a voter keeps for itself never touches the network.
    let mut kept: BTreeMap<PartyId, BitString> = BTreeMap::new();
    for &v in &voters {
        let choice = s.choices[&v];
        let honest = build_vote_matrix(choice, &cfg, s.rng(v))?;
        let Action::Cast(vote) = s.act(v, Action::Cast(honest), None, n)? else {
            unreachable!()
        };
        let shares = share_bits(&vote.to_bits(), n, s.rng(v))?;
        let Action::Share(shares) = s.act(v, Action::Share(shares), None, n)? else {
            unreachable!()
        };
        if shares.len() != n || shares.iter().any(|sh| sh.len() != cfg.vote_bits()) {
            return Err(Error::config(format!("{v} produced malformed shares")).into());
        }
        for (l, share) in shares.into_iter().enumerate() {
            let to = PartyId::voter(l + 1);
            if to == v {
                kept.insert(v, share);
            } else {
                s.net.send_private(PHASE_CAST, v, to, share)?;
            }
        }
    }

    // Phase B
    let mut submissions = Vec::with_capacity(n);
    for &v in &voters {
        let mut q = kept.remove(&v).unwrap();
        for env in s.net.take_private(v, PHASE_CAST)? {
            q ^= &env.payload;
        }
        let Action::ParitySubmit(q) = s.act(v, Action::ParitySubmit(Some(q)), None, n)? else {
            unreachable!()
        };
        submissions.push((v, q));
    }
    let revealed = s.exchange(PHASE_BROADCAST, &voters, submissions)?;

    // Phase C
    let contributions: Vec<BitString> = revealed.into_values().collect();
    let acc = aggregate_parities(&contributions, n, m, cfg.positions())?;
    let result = finalize_tally(&acc, n, n);
    Ok(Tallied::from_result(result, acc.sigma, Vec::new()))
}
