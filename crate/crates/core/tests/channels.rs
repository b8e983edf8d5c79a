use std::io::BufReader;

use vote_sim::channels::{ChannelKind, Network, PartyId, SimultaneousBroadcast, Transport, DIGEST_BITS, NONCE_BITS};
use vote_sim::protocols::{ballots_from_choices, run_protocol, ProtocolKind};
use vote_sim::{BitString, ProtocolConfig, TransportKind};

fn parties() -> Vec<PartyId> {
    (1..=3).map(PartyId::authority).collect()
}

#[test]
fn both_transports_deliver_the_same_values() {
    let ps = parties();
    let values: Vec<(PartyId, Option<BitString>)> = ps
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, Some(BitString::from_str_bits(&format!("{:08b}", 37 * (i + 1))))))
        .collect();
    let mut delivered = Vec::new();
    for kind in [TransportKind::Memory, TransportKind::CommitReveal] {
        let mut net = Network::new(ps.clone());
        let mut t = Transport::new(kind, 1);
        delivered.push(t.exchange(&mut net, "x", &ps, values.clone()).unwrap());
    }
    assert_eq!(delivered[0], delivered[1]);
}

#[test]
fn commit_reveal_logs_commitments_before_openings() {
    let ps = parties();
    let mut net = Network::new(ps.clone());
    let mut t = Transport::new(TransportKind::CommitReveal, 2);
    let values = ps.iter().map(|&p| (p, Some(BitString::from_str_bits("101")))).collect();
    t.exchange(&mut net, "x", &ps, values).unwrap();
    let events = net.transcript().events();
    let last_commit = events.iter().rposition(|e| e.phase == "x/commit").unwrap();
    let first_open = events.iter().position(|e| e.phase == "x/open").unwrap();
    assert!(last_commit < first_open);
    for e in events.iter().filter(|e| e.kind == ChannelKind::Broadcast) {
        let expected = if e.phase.ends_with("commit") { DIGEST_BITS } else { 3 + NONCE_BITS };
        assert_eq!(e.bits, expected);
    }
}

#[test]
fn missing_submission_aborts_for_both_transports() {
    let ps = parties();
    for kind in [TransportKind::Memory, TransportKind::CommitReveal] {
        let mut net = Network::new(ps.clone());
        let mut t = Transport::new(kind, 3);
        let values = vec![(ps[0], Some(BitString::zeros(2))), (ps[1], None), (ps[2], Some(BitString::zeros(2)))];
        let err = t.exchange(&mut net, "x", &ps, values).unwrap_err();
        assert_eq!(err.offender(), Some(ps[1]), "{kind}");
    }
}

#[test]
fn transcripts_survive_tsv_round_trip() {
    let cfg = ProtocolConfig::new(3, 2, 2, 2).with_transport(TransportKind::CommitReveal);
    let out = run_protocol(ProtocolKind::Verified, &cfg, &ballots_from_choices(&[1, 2, 1]), &[], 1).unwrap();
    let mut buf = Vec::new();
    out.transcript.write_tsv(&mut buf, true).unwrap();
    let back = vote_sim::channels::Transcript::parse_tsv(BufReader::new(&buf[..])).unwrap();
    assert_eq!(back.len(), out.transcript.len());
    assert_eq!(back.events()[0], out.transcript.events()[0]);
}

#[test]
fn private_messages_are_hidden_from_other_parties() {
    let cfg = ProtocolConfig::new(3, 2, 1, 1);
    let out = run_protocol(ProtocolKind::Basic, &cfg, &ballots_from_choices(&[1, 2, 1]), &[], 1).unwrap();
    let view = out.transcript.view_for(&[PartyId::voter(3)]);
    for e in view.iter().filter(|e| e.kind == ChannelKind::Private) {
        let involved = e.sender == Some(PartyId::voter(3)) || e.receivers.includes(&PartyId::voter(3));
        assert_eq!(e.payload.is_some(), involved);
    }
}
