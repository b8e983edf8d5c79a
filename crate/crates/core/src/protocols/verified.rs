use std::collections::{BTreeMap, BTreeSet};

use super::authority::authority_tally;
use super::{Ballot, Halt, ProtocolKind, RunOutcome, Session, Tallied};
use crate::adversary::{Action, AdversarySpec};
use crate::bits::BitString;
use crate::channels::PartyId;
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::primitives::{
    build_vote_matrix, common_random_bits, equality_contribution, equality_results, is_correct_vote, permute_vote,
    random_s_subset, share_matrix, subset_chunk_bits, VoteEncryption, VoteMatrix,
};

pub const PHASE_RANDOMNESS: &str = "randomness";
pub const PHASE_RANDOMNESS_EXTRA: &str = "randomness-extra";
pub const PHASE_DISTRIBUTE: &str = "distribute";
pub const PHASE_OPEN: &str = "open";
pub const PHASE_REPORT: &str = "report";
pub const PHASE_COMPLAINT: &str = "complaint";
pub const PHASE_REVEAL_PERM: &str = "reveal-perm";
pub const PHASE_EQUALITY: &str = "equality";
pub const PHASE_REVOKE: &str = "revoke";

/// Rejection-sampling chunks of common randomness drawn per voter and round.
pub const CHUNKS_PER_VOTER: usize = 8;
const MAX_RANDOMNESS_ROUNDS: usize = 64;

/// Protocol 2 with cut-and-choose verification of every vote.
///
/// Each voter hands the authorities `2s` independently shared and encrypted
/// copies of its vote. Common random bits pick `s` copies to open; an opened
/// copy that is not a correct vote revokes the ballot. The voter then
/// reveals the encryptions of the unopened copies, the authorities decrypt
/// their shares and test the copies for equality bit by bit. The first
/// unopened copy of every surviving voter is tallied as in protocol 2.
pub fn run_protocol3(
    cfg: &ProtocolConfig,
    ballots: &[Ballot],
    strategies: &[AdversarySpec],
    seed: u64,
) -> Result<RunOutcome> {
    let mut session = Session::new(cfg, ballots, strategies, seed, true)?;
    let body = body(&mut session);
    session.finish(ProtocolKind::Verified, body)
}

fn body(s: &mut Session) -> std::result::Result<Tallied, Halt> {
    let cfg = s.cfg;
    let n = cfg.voters;
    let sec = cfg.security;
    let copies = 2 * sec;
    let (m, len) = (cfg.effective_candidates(), cfg.positions());
    let voters = s.voters();
    let authorities = s.authorities();

    let opened = choose_openings(s)?;

    // Steps 1-4: build, copy, encrypt and distribute.
    let mut encryptions: Vec<Vec<VoteEncryption>> = Vec::with_capacity(n);
    for &v in &voters {
        let choice = s.choices[&v];
        let honest = build_vote_matrix(choice, &cfg, s.rng(v))?;
        let Action::Cast(vote) = s.act(v, Action::Cast(honest), None, n)? else {
            unreachable!()
        };
        let Action::Copy(made) = s.act(v, Action::Copy(vec![vote; copies]), None, n)? else {
            unreachable!()
        };
        if made.len() != copies || made.iter().any(|c| c.candidates() != m || c.positions() != len) {
            return Err(Error::config(format!("{v} produced malformed copies")).into());
        }
        let mut payloads = vec![BitString::zeros(0); authorities.len()];
        let mut encs = Vec::with_capacity(copies);
        for copy in &made {
            let rng = s.rng(v);
            let enc = VoteEncryption::random(m, len, rng);
            let hidden = permute_vote(copy, &enc)?;
            for (p, share) in payloads.iter_mut().zip(share_matrix(&hidden, authorities.len(), rng)?) {
                p.extend_from(&share.to_bits());
            }
            encs.push(enc);
        }
        let Action::Share(payloads) = s.act(v, Action::Share(payloads), None, n)? else {
            unreachable!()
        };
        if payloads.len() != authorities.len() || payloads.iter().any(|p| p.len() != copies * m * len) {
            return Err(Error::config(format!("{v} produced malformed shares")).into());
        }
        for (a, p) in authorities.iter().zip(payloads) {
            s.net.send_private(PHASE_DISTRIBUTE, v, *a, p)?;
        }
        encryptions.push(encs);
    }

    // held[a][voter slot][copy]
    let mut held: BTreeMap<PartyId, Vec<Vec<VoteMatrix>>> = BTreeMap::new();
    for &a in &authorities {
        let mut per_voter = vec![Vec::new(); n];
        for env in s.net.take_private(a, PHASE_DISTRIBUTE)? {
            let w = m * len;
            per_voter[env.from.slot()] = (0..copies)
                .map(|c| VoteMatrix::from_bits(&env.payload.slice(c * w, w), m, len))
                .collect::<Result<_>>()?;
        }
        held.insert(a, per_voter);
    }

    // Step 5: open the chosen copies publicly.
    let mut submissions = Vec::with_capacity(authorities.len());
    for &a in &authorities {
        let mut bits = BitString::zeros(0);
        for (i, set) in opened.iter().enumerate() {
            for &c in set {
                bits.extend_from(&held[&a][i][c].to_bits());
            }
        }
        submissions.push((a, Some(bits)));
    }
    let revealed = s.exchange(PHASE_OPEN, &authorities, submissions)?;

    // Step 6: every opened copy must be a correct vote.
    let contributions: Vec<BitString> = revealed.into_values().collect();
    let opened_bits = common_random_bits(&contributions)?;
    let mut bad_opening = BTreeSet::new();
    let mut offset = 0;
    for (i, set) in opened.iter().enumerate() {
        for _ in set {
            let copy = VoteMatrix::from_bits(&opened_bits.slice(offset, m * len), m, len)?;
            offset += m * len;
            if !is_correct_vote(&copy, &cfg)? {
                bad_opening.insert(voters[i]);
            }
        }
    }

    // Step 7: every authority tells every voter which copies were opened.
    for &a in &authorities {
        for (i, &v) in voters.iter().enumerate() {
            let Action::OpenReport(set) = s.act(a, Action::OpenReport(opened[i].clone()), Some(v), n)? else {
                unreachable!()
            };
            let mask: BitString = (0..copies).map(|c| set.contains(&c)).collect();
            s.net.send_private(PHASE_REPORT, a, v, mask)?;
        }
    }
    let mut complained = BTreeSet::new();
    let mut believed: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    for &v in &voters {
        let masks: Vec<BitString> = s.net.take_private(v, PHASE_REPORT)?.into_iter().map(|e| e.payload).collect();
        if masks.windows(2).any(|w| w[0] != w[1]) {
            s.net.broadcast(PHASE_COMPLAINT, v, BitString::from_bits([true]))?;
            complained.insert(v);
        }
        believed.push(masks.first().map(|m| m.ones().collect()).unwrap_or_default());
    }
    // Authorities hear complaints over broadcast; drain them.
    for &a in &authorities {
        s.net.take_inbox(a)?;
    }

    // Step 8: surviving voters reveal the encryptions of the unopened copies;
    // authorities undo them on their shares.
    let mut bad_reveal = BTreeSet::new();
    let mut active = Vec::new();
    for (i, &v) in voters.iter().enumerate() {
        if bad_opening.contains(&v) || complained.contains(&v) {
            continue;
        }
        let mut bits = BitString::zeros(0);
        for c in (0..copies).filter(|c| !believed[i].contains(c)) {
            bits.extend_from(&encryptions[i][c].to_bits());
        }
        s.net.broadcast(PHASE_REVEAL_PERM, v, bits.clone())?;
        match parse_encryptions(&bits, m, len, sec) {
            Some(encs) => {
                let unopened: Vec<usize> = (0..copies).filter(|c| !opened[i].contains(c)).collect();
                for a in &authorities {
                    let shares = &mut held.get_mut(a).unwrap()[i];
                    for (c, enc) in unopened.iter().zip(&encs) {
                        shares[*c] = permute_vote(&shares[*c], &enc.inverse())?;
                    }
                }
                active.push(i);
            }
            None => {
                bad_reveal.insert(v);
            }
        }
    }
    for p in voters.iter().chain(&authorities) {
        s.net.take_inbox(*p)?;
    }

    // Step 9: the first unopened copy must equal every other unopened copy.
    let mut unequal = BTreeSet::new();
    if sec >= 2 && !active.is_empty() {
        let mut submissions = Vec::with_capacity(authorities.len());
        for &a in &authorities {
            let mut bits = BitString::zeros(0);
            for &i in &active {
                let shares = &held[&a][i];
                let mut unopened = (0..copies).filter(|c| !opened[i].contains(c));
                let first = shares[unopened.next().unwrap()].to_bits();
                for c in unopened {
                    bits.extend_from(&equality_contribution(&first, &shares[c].to_bits()));
                }
            }
            let Action::EqualitySubmit(bits) = s.act(a, Action::EqualitySubmit(Some(bits)), None, n)? else {
                unreachable!()
            };
            submissions.push((a, bits));
        }
        let revealed = s.exchange(PHASE_EQUALITY, &authorities, submissions)?;
        let contributions: Vec<BitString> = revealed.into_values().collect();
        let passed = equality_results(&contributions)?;
        let per_voter = (sec - 1) * m * len;
        for (t, &i) in active.iter().enumerate() {
            if passed.slice(t * per_voter, per_voter).count_ones() != per_voter {
                unequal.insert(voters[i]);
            }
        }
    }

    // Revocation: every authority broadcasts its list; they must agree.
    let honest_revoked: BTreeSet<PartyId> = bad_opening
        .iter()
        .chain(&complained)
        .chain(&bad_reveal)
        .chain(&unequal)
        .copied()
        .collect();
    let mut lists = Vec::with_capacity(authorities.len());
    for &a in &authorities {
        let Action::RevokeVote(list) = s.act(a, Action::RevokeVote(honest_revoked.clone()), None, n)? else {
            unreachable!()
        };
        let mask: BitString = voters.iter().map(|v| list.contains(v)).collect();
        s.net.broadcast(PHASE_REVOKE, a, mask)?;
        lists.push(list);
    }
    for p in voters.iter().chain(&authorities) {
        s.net.take_inbox(*p)?;
    }
    let union: BTreeSet<PartyId> = lists.iter().flatten().copied().collect();
    if lists.windows(2).any(|w| w[0] != w[1]) {
        return Err(Halt::Disagreement(
            "authorities broadcast different revocation lists".into(),
            union.into_iter().collect(),
        ));
    }
    let revoked: Vec<PartyId> = union.into_iter().collect();
    let counted = n - revoked.len();
    if counted == 0 {
        return Ok(Tallied {
            outcome: Ok(vec![0; m]),
            sigma: Vec::new(),
            revoked,
        });
    }

    // Phase C: protocol 2 over the kept copies of counted voters.
    let mut q = BTreeMap::new();
    for &a in &authorities {
        let mut acc = BitString::zeros(m * len);
        for (i, v) in voters.iter().enumerate() {
            if revoked.contains(v) {
                continue;
            }
            let kept = (0..copies).find(|c| !opened[i].contains(c)).unwrap();
            acc ^= &held[&a][i][kept].to_bits();
        }
        q.insert(a, acc);
    }
    authority_tally(s, q, counted, revoked)
}

/// Phase A: common random bits from all authorities, turned into one opened
/// subset per voter. Voters whose chunks were all rejected get another
/// batch.
fn choose_openings(s: &mut Session) -> std::result::Result<Vec<BTreeSet<usize>>, Halt> {
    let cfg = s.cfg;
    let n = cfg.voters;
    let authorities = s.authorities();
    let per_voter = CHUNKS_PER_VOTER * subset_chunk_bits(cfg.security)?;

    let mut opened = vec![BTreeSet::new(); n];
    let mut entropy = vec![BitString::zeros(0); n];
    let mut pending: Vec<usize> = (0..n).collect();
    for round in 0..MAX_RANDOMNESS_ROUNDS {
        let bits = pending.len() * per_voter;
        let mut submissions = Vec::with_capacity(authorities.len());
        for &a in &authorities {
            let honest = BitString::random(bits, s.rng(a));
            let Action::Coin(c) = s.act(a, Action::Coin(Some(honest)), None, n)? else {
                unreachable!()
            };
            submissions.push((a, c));
        }
        let phase = if round == 0 {
            PHASE_RANDOMNESS
        } else {
            PHASE_RANDOMNESS_EXTRA
        };
        let revealed = s.exchange(phase, &authorities, submissions)?;
        let contributions: Vec<BitString> = revealed.into_values().collect();
        let common = common_random_bits(&contributions)?;
        let mut still = Vec::new();
        for (t, &i) in pending.iter().enumerate() {
            entropy[i].extend_from(&common.slice(t * per_voter, per_voter));
            match random_s_subset(&entropy[i], cfg.security) {
                Ok(set) => opened[i] = set,
                Err(Error::NeedsMoreRandomness { .. }) => still.push(i),
                Err(e) => return Err(e.into()),
            }
        }
        if still.is_empty() {
            return Ok(opened);
        }
        pending = still;
    }
    Err(Halt::Stalled(format!(
        "common randomness rejected every chunk for {} voters after {MAX_RANDOMNESS_ROUNDS} rounds",
        pending.len()
    )))
}

fn parse_encryptions(bits: &BitString, m: usize, len: usize, count: usize) -> Option<Vec<VoteEncryption>> {
    let w = VoteEncryption::encoded_bits(m, len);
    if bits.len() != w * count {
        return None;
    }
    (0..count)
        .map(|t| {
            let enc = VoteEncryption::from_bits(&bits.slice(t * w, w)).ok()?;
            (enc.candidate_perm.len() == m && enc.position_perm.len() == len).then_some(enc)
        })
        .collect()
}
