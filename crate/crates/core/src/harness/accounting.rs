//! Bit counts of a finished run checked against closed-form message sizes.

use serde::{Deserialize, Serialize};

use crate::channels::{AccountingReport, ChannelKind, PartyId, DIGEST_BITS, NONCE_BITS};
use crate::config::TransportKind;
use crate::primitives::{subset_chunk_bits, VoteEncryption};
use crate::protocols::{announcement_bits, ProtocolKind, RunRecord, CHUNKS_PER_VOTER};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRow {
    pub what: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountingCheck {
    pub pass: bool,
    pub rows: Vec<CheckRow>,
}

impl AccountingCheck {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.ok)
    }
}

struct Checker<'a> {
    report: &'a AccountingReport,
    transport: TransportKind,
    rows: Vec<CheckRow>,
}

impl Checker<'_> {
    fn push(&mut self, what: String, expected: String, actual: String, ok: bool) {
        self.rows.push(CheckRow {
            what,
            expected,
            actual,
            ok,
        });
    }

    /// `count` messages of exactly `bits` bits each.
    fn messages(&mut self, phase: &str, kind: ChannelKind, party: PartyId, count: usize, bits: usize) {
        let what = format!("{phase} {kind} {party}");
        let expected = format!("{count} x {bits}");
        match self.report.row(phase, kind, party) {
            Some(r) => {
                let actual = format!("{} x {}..{}", r.messages, r.smallest, r.largest);
                let ok = r.messages == count && r.uniform(bits);
                self.push(what, expected, actual, ok);
            }
            None => self.push(what, expected, "none".into(), count == 0),
        }
    }

    /// One simultaneous-broadcast submission of `bits` bits, in whichever
    /// form the transport carries it.
    fn submission(&mut self, phase: &str, party: PartyId, bits: usize) {
        match self.transport {
            TransportKind::Memory => self.messages(phase, ChannelKind::SimultaneousBroadcast, party, 1, bits),
            TransportKind::CommitReveal => {
                self.messages(&format!("{phase}/commit"), ChannelKind::Broadcast, party, 1, DIGEST_BITS);
                self.messages(&format!("{phase}/open"), ChannelKind::Broadcast, party, 1, bits + NONCE_BITS);
            }
        }
    }

    /// One submission of at most `limit` bits.
    fn bounded_submission(&mut self, phase: &str, party: PartyId, exact: usize, limit: f64) {
        self.submission(phase, party, exact);
        self.push(
            format!("{phase} {party} bound"),
            format!("<= {limit:.3}"),
            exact.to_string(),
            exact as f64 <= limit + 1e-9,
        );
    }
}

/// Compares every per-phase, per-party message size of a completed run with
/// its closed form. Runs that stopped early can fail the check for phases
/// they never reached; a run without any messages passes trivially.
pub fn verify_accounting(record: &RunRecord) -> AccountingCheck {
    let report = &record.accounting;
    if report.rows.is_empty() {
        return AccountingCheck {
            pass: true,
            rows: Vec::new(),
        };
    }
    let cfg = record.config;
    let (n, r, s) = (cfg.voters, cfg.authorities, cfg.security);
    let m = cfg.effective_candidates();
    let len = cfg.positions();
    let vote = m * len;
    let counted = n - record.revoked.len();
    let announce_limit = m as f64 * (n as f64).log2();
    let voters: Vec<PartyId> = (1..=n).map(PartyId::voter).collect();
    let authorities: Vec<PartyId> = (1..=r).map(PartyId::authority).collect();

    let mut c = Checker {
        report,
        transport: cfg.transport,
        rows: Vec::new(),
    };
    match record.protocol {
        ProtocolKind::Basic => {
            for &v in &voters {
                c.messages("cast", ChannelKind::Private, v, n - 1, vote);
                c.submission("broadcast", v, vote);
            }
        }
        ProtocolKind::Authority => {
            for &v in &voters {
                c.messages("cast", ChannelKind::Private, v, r, vote);
            }
            for &a in &authorities {
                c.submission("broadcast", a, vote);
                c.bounded_submission("announce", a, announcement_bits(counted, m), announce_limit);
            }
        }
        ProtocolKind::Verified => {
            let chunk = subset_chunk_bits(s).unwrap_or(0);
            let revoked_early = |v: &PartyId| {
                report.row("complaint", ChannelKind::Broadcast, *v).is_some()
                    || report.row("reveal-perm", ChannelKind::Broadcast, *v).is_none()
            };
            let active = voters.iter().filter(|v| !revoked_early(v)).count();
            for &v in &voters {
                c.messages("distribute", ChannelKind::Private, v, r, 2 * s * vote);
                if !revoked_early(&v) {
                    c.messages(
                        "reveal-perm",
                        ChannelKind::Broadcast,
                        v,
                        1,
                        s * VoteEncryption::encoded_bits(m, len),
                    );
                }
            }
            for &a in &authorities {
                c.submission("randomness", a, n * CHUNKS_PER_VOTER * chunk);
                c.submission("open", a, n * s * vote);
                c.messages("report", ChannelKind::Private, a, n, 2 * s);
                if s >= 2 && active > 0 {
                    c.submission("equality", a, active * (s - 1) * vote);
                } else {
                    c.messages("equality", ChannelKind::SimultaneousBroadcast, a, 0, 0);
                }
                c.messages("revoke", ChannelKind::Broadcast, a, 1, n);
                if counted > 0 {
                    c.submission("broadcast", a, vote);
                    c.bounded_submission("announce", a, announcement_bits(counted, m), announce_limit);
                }
            }
        }
    }
    let pass = c.rows.iter().all(|r| r.ok);
    AccountingCheck { pass, rows: c.rows }
}
