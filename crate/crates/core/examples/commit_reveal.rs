//! The simultaneous broadcast channel can be an ideal trusted mailbox or a
//! hash-commitment round over plain broadcast. Both give the same tally for
//! the same seed; only the transcript changes.
//!
//!     cargo run --release --example commit_reveal

use vote_sim::channels::ChannelKind;
use vote_sim::protocols::{ballots_from_choices, run_protocol, ProtocolKind};
use vote_sim::{ProtocolConfig, TransportKind};

fn main() -> anyhow::Result<()> {
    let ballots = ballots_from_choices(&[1, 1, 2, 2, 1]);
    for kind in [TransportKind::Memory, TransportKind::CommitReveal] {
        let cfg = ProtocolConfig::new(5, 2, 2, 300).with_transport(kind);
        let out = run_protocol(ProtocolKind::Authority, &cfg, &ballots, &[], 99)?;
        println!("{kind}: tally {:?}", out.counts());
        for row in out.accounting().rows {
            if row.kind != ChannelKind::Private {
                println!("  {:<18} {:<24} {:<12} {} bits", row.phase, row.kind, row.party, row.bits);
            }
        }
    }
    Ok(())
}
