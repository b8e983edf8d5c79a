//! Every run records how many messages and bits each party sent per phase.
//! The harness compares those counts against closed-form sizes.
//!
//!     cargo run --release --example accounting

use vote_sim::harness::verify_accounting;
use vote_sim::protocols::{ballots_from_choices, run_protocol, ProtocolKind};
use vote_sim::ProtocolConfig;

fn main() -> anyhow::Result<()> {
    let cfg = ProtocolConfig::new(3, 2, 2, 3);
    let ballots = ballots_from_choices(&[1, 2, 2]);
    for kind in ProtocolKind::ALL {
        let out = run_protocol(kind, &cfg, &ballots, &[], 1)?;
        let check = verify_accounting(&out.to_record());
        println!("{kind}: {}", if check.pass { "pass" } else { "FAIL" });
        for row in &check.rows {
            println!("  {:<4} {:<44} expected {:<12} got {}", if row.ok { "ok" } else { "BAD" }, row.what, row.expected, row.actual);
        }
    }
    Ok(())
}
