//! Voters share among `r` authorities; only the authorities talk after
//! casting. Each authority's announcement is a compact encoding of the
//! tally, and the run fails if the announcements differ.
//!
//!     cargo run --release --example authority_vote

use vote_sim::protocols::{announcement_bits, ballots_from_choices, run_protocol2};
use vote_sim::ProtocolConfig;

fn main() -> anyhow::Result<()> {
    let choices = [2, 1, 1, 2, 2, 1, 2];
    for r in 1..=3 {
        let cfg = ProtocolConfig::new(choices.len(), 2, r, 500);
        let out = run_protocol2(&cfg, &ballots_from_choices(&choices), &[], 11)?;
        println!(
            "r = {r}: tally {:?}, announcement {} bits",
            out.counts(),
            announcement_bits(cfg.voters, cfg.candidates)
        );
    }

    // A dummy candidate lets a voter abstain; its count is checked but kept apart.
    let cfg = ProtocolConfig::new(4, 2, 2, 500).with_dummy_candidate(true);
    let out = run_protocol2(&cfg, &ballots_from_choices(&[1, 3, 2, 1]), &[], 12)?;
    println!("with abstention: tally {:?}, abstained {:?}", out.counts(), out.dummy);
    Ok(())
}
