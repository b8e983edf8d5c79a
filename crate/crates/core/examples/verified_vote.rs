//! Cut and choose: every voter submits 2s encrypted copies of its vote,
//! common coins open half of them, and the unopened ones are checked for
//! equality before one of them is tallied. A voter caught cheating is
//! revoked instead of spoiling the election.
//!
//!     cargo run --release --example verified_vote

use vote_sim::adversary::{AdversarySpec, Strategy};
use vote_sim::channels::PartyId;
use vote_sim::protocols::{ballots_from_choices, run_protocol3};
use vote_sim::ProtocolConfig;

fn main() -> anyhow::Result<()> {
    let choices = [1, 2, 2, 1];
    let cfg = ProtocolConfig::new(choices.len(), 2, 3, 200);
    let ballots = ballots_from_choices(&choices);

    let out = run_protocol3(&cfg, &ballots, &[], 5)?;
    println!("honest:   tally {:?}, revoked {:?}", out.counts(), out.revoked);

    let cheat = AdversarySpec::new(PartyId::voter(2), Strategy::DoubleVoter)?;
    let out = run_protocol3(&cfg, &ballots, &[cheat], 5)?;
    println!(
        "cheating: tally {:?}, revoked {}",
        out.counts(),
        out.revoked.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    );
    Ok(())
}
