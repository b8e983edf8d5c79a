//! A tour of the built-in misbehaviors and what each protocol does about
//! them. Strategies are written the same way as on the command line.
//!
//!     cargo run --release --example adversaries

use vote_sim::adversary::AdversarySpec;
use vote_sim::protocols::{ballots_from_choices, run_protocol, ProtocolKind};
use vote_sim::ProtocolConfig;

fn main() -> anyhow::Result<()> {
    let cases = [
        (ProtocolKind::Basic, "party=voter:1 strategy=noise rate=0.5"),
        (ProtocolKind::Basic, "party=voter:1 strategy=double-voter"),
        (ProtocolKind::Authority, "party=authority:2 strategy=parity-flipper"),
        (ProtocolKind::Authority, "party=authority:1 strategy=false-announcer"),
        (ProtocolKind::Verified, "party=voter:3 strategy=overweight count=3"),
        (ProtocolKind::Verified, "party=voter:2 strategy=unequal-copier"),
        (ProtocolKind::Verified, "party=authority:1 strategy=malicious-revoker target=voter:4"),
    ];
    let ballots = ballots_from_choices(&[1, 2, 1, 2]);
    for (kind, text) in cases {
        let spec: AdversarySpec = text.parse()?;
        let security = if kind == ProtocolKind::Verified { 100 } else { 500 };
        let cfg = ProtocolConfig::new(4, 2, 2, security);
        let out = run_protocol(kind, &cfg, &ballots, &[spec], 3)?;
        let tally = match out.counts() {
            Some(c) => format!("{c:?}"),
            None => format!("FAIL {}", out.failure_cause.map(|c| c.to_string()).unwrap_or_default()),
        };
        let revoked: Vec<String> = out.revoked.iter().map(|p| p.to_string()).collect();
        println!("{:<9} {text:<58} {tally:<22} revoked [{}]", kind.to_string(), revoked.join(","));
    }
    Ok(())
}
