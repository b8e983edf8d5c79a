use vote_sim::adversary::AdversarySpec;
use vote_sim::channels::PartyId;
use vote_sim::protocols::{ballots_from_choices, run_protocol, FailureCause, ProtocolKind};
use vote_sim::ProtocolConfig;

fn run(kind: ProtocolKind, cfg: ProtocolConfig, choices: &[usize], specs: &[&str], seed: u64) -> vote_sim::protocols::RunOutcome {
    let specs: Vec<AdversarySpec> = specs.iter().map(|s| s.parse().unwrap()).collect();
    run_protocol(kind, &cfg, &ballots_from_choices(choices), &specs, seed).unwrap()
}

#[test]
fn misbehaving_authorities_break_the_authority_protocol() {
    let cfg = ProtocolConfig::new(4, 2, 3, 500);
    for seed in 0..10 {
        let out = run(ProtocolKind::Authority, cfg, &[1, 2, 2, 1], &["party=authority:3 strategy=parity-flipper"], seed);
        assert!(out.failed());
        let out = run(ProtocolKind::Authority, cfg, &[1, 2, 2, 1], &["party=authority:1 strategy=false-announcer"], seed);
        assert_eq!(out.failure_cause, Some(FailureCause::Disagreement));
    }
}

#[test]
fn silent_authority_aborts_the_broadcast() {
    let cfg = ProtocolConfig::new(3, 2, 2, 50);
    for kind in [ProtocolKind::Authority, ProtocolKind::Verified] {
        let out = run(kind, cfg, &[1, 2, 2], &["party=authority:2 strategy=silent"], 1);
        assert_eq!(out.failure_cause, Some(FailureCause::BroadcastAbort), "{kind}");
    }
}

#[test]
fn cheating_voters_are_revoked_and_the_rest_counted() {
    let cfg = ProtocolConfig::new(4, 2, 2, 200);
    let cases = [
        "party=voter:2 strategy=double-voter",
        "party=voter:2 strategy=overweight count=2",
        "party=voter:2 strategy=noise rate=0.5",
    ];
    for text in cases {
        let out = run(ProtocolKind::Verified, cfg, &[1, 2, 2, 1], &[text], 9);
        assert_eq!(out.revoked, vec![PartyId::voter(2)], "{text}");
        assert_eq!(out.counts(), Some(&[2, 1][..]), "{text}");
    }
}

#[test]
fn fresh_copier_is_caught_by_equality() {
    // Independent honest copies differ bit-wise, so the equality test flags them.
    let cfg = ProtocolConfig::new(3, 2, 2, 4);
    let out = run(ProtocolKind::Verified, cfg, &[1, 2, 2], &["party=voter:1 strategy=fresh-copier"], 2);
    assert_eq!(out.revoked, vec![PartyId::voter(1)]);
}

#[test]
fn malicious_revoker_causes_disagreement_not_silent_exclusion() {
    let cfg = ProtocolConfig::new(4, 2, 3, 30);
    let out = run(
        ProtocolKind::Verified,
        cfg,
        &[1, 2, 1, 2],
        &["party=authority:2 strategy=malicious-revoker target=voter:1"],
        6,
    );
    assert_eq!(out.failure_cause, Some(FailureCause::Disagreement));
    assert_eq!(out.revoked, vec![PartyId::voter(1)]);
}

#[test]
fn honest_coalition_changes_nothing() {
    let cfg = ProtocolConfig::new(4, 2, 1, 500);
    let out = run(
        ProtocolKind::Basic,
        cfg,
        &[1, 2, 1, 1],
        &[
            "party=voter:2 strategy=honest coalition=c",
            "party=voter:3 strategy=honest coalition=c",
        ],
        8,
    );
    assert_eq!(out.counts(), Some(&[3, 1][..]));
}

#[test]
fn spec_strings_round_trip() {
    for text in [
        "party=voter:1 strategy=noise rate=0.25",
        "party=authority:2 strategy=coin-biaser value=1",
        "party=authority:1 strategy=equivocator",
        "party=voter:3 strategy=unequal-copier coalition=x",
    ] {
        let spec: AdversarySpec = text.parse().unwrap();
        let again: AdversarySpec = spec.to_string().parse().unwrap();
        assert_eq!(spec, again);
    }
    assert!("party=voter:1".parse::<AdversarySpec>().is_err());
    assert!("party=voter:0 strategy=honest".parse::<AdversarySpec>().is_err());
    assert!("party=authority:1 strategy=double-voter".parse::<AdversarySpec>().is_err());
}
