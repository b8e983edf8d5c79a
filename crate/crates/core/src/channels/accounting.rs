//! Message and bit counts per phase, channel kind and sending party.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::party::PartyId;
use super::transcript::{ChannelKind, Transcript};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountingRow {
    pub phase: String,
    pub kind: ChannelKind,
    pub party: PartyId,
    pub messages: usize,
    pub bits: usize,
    /// Size of the smallest and largest single message in the row.
    pub smallest: usize,
    pub largest: usize,
}

/// Rows in order of first appearance in the transcript.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccountingReport {
    pub rows: Vec<AccountingRow>,
}

pub fn accounting_report(transcript: &Transcript) -> AccountingReport {
    let mut rows: Vec<AccountingRow> = Vec::new();
    let mut index: HashMap<(&str, ChannelKind, PartyId), usize> = HashMap::new();
    for e in transcript.events() {
        let Some(sender) = e.sender else { continue };
        if !e.kind.is_message() {
            continue;
        }
        let slot = *index.entry((e.phase.as_str(), e.kind, sender)).or_insert_with(|| {
            rows.push(AccountingRow {
                phase: e.phase.clone(),
                kind: e.kind,
                party: sender,
                messages: 0,
                bits: 0,
                smallest: usize::MAX,
                largest: 0,
            });
            rows.len() - 1
        });
        let row = &mut rows[slot];
        row.messages += 1;
        row.bits += e.bits;
        row.smallest = row.smallest.min(e.bits);
        row.largest = row.largest.max(e.bits);
    }
    AccountingReport { rows }
}

impl AccountingRow {
    /// Every message in the row has exactly `bits` bits.
    pub fn uniform(&self, bits: usize) -> bool {
        self.smallest == bits && self.largest == bits
    }
}

impl AccountingReport {
    pub fn row(&self, phase: &str, kind: ChannelKind, party: PartyId) -> Option<&AccountingRow> {
        self.rows
            .iter()
            .find(|r| r.phase == phase && r.kind == kind && r.party == party)
    }

    /// `(messages, bits)` summed over all rows of a phase.
    pub fn phase_totals(&self, phase: &str) -> (usize, usize) {
        self.rows
            .iter()
            .filter(|r| r.phase == phase)
            .fold((0, 0), |(m, b), r| (m + r.messages, b + r.bits))
    }

    pub fn total_bits(&self) -> usize {
        self.rows.iter().map(|r| r.bits).sum()
    }

    /// CSV with columns `phase,kind,party,messages,bits`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["phase", "kind", "party", "messages", "bits"])?;
        for r in &self.rows {
            w.write_record([
                r.phase.clone(),
                r.kind.to_string(),
                r.party.to_string(),
                r.messages.to_string(),
                r.bits.to_string(),
            ])?;
        }
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::channels::Network;

    #[test]
    fn empty_transcript_reports_nothing() {
        let r = accounting_report(&Transcript::new());
        assert!(r.rows.is_empty());
        assert_eq!(r.total_bits(), 0);
    }

    #[test]
    fn counts_per_sender() {
        let (v, a1, a2) = (PartyId::voter(1), PartyId::authority(1), PartyId::authority(2));
        let mut net = Network::new([v, a1, a2]);
        net.send_private("cast", v, a1, BitString::zeros(10)).unwrap();
        net.send_private("cast", v, a2, BitString::zeros(10)).unwrap();
        net.broadcast("announce", a1, BitString::zeros(3)).unwrap();
        let r = accounting_report(net.transcript());
        assert_eq!(r.row("cast", ChannelKind::Private, v).unwrap().messages, 2);
        assert_eq!(r.row("cast", ChannelKind::Private, v).unwrap().bits, 20);
        assert_eq!(r.phase_totals("announce"), (1, 3));

        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "phase,kind,party,messages,bits");
        assert_eq!(text.lines().nth(1).unwrap(), "cast,private,voter:1,2,20");
    }
}
