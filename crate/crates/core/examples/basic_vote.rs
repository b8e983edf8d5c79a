//! Voters only: every voter splits its vote matrix among the others, then
//! broadcasts the XOR of what it holds. Anyone can decode the tally from
//! the public parities.
//!
//!     cargo run --release --example basic_vote

use vote_sim::protocols::{ballots_from_choices, run_protocol1};
use vote_sim::tally::DecoderTable;
use vote_sim::ProtocolConfig;

fn main() -> anyhow::Result<()> {
    let cfg = ProtocolConfig::new(5, 3, 1, 500);
    let choices = [1, 3, 3, 2, 3];
    let out = run_protocol1(&cfg, &ballots_from_choices(&choices), &[], 7)?;

    let table = DecoderTable::new(cfg.voters)?;
    println!("ballots     {choices:?}");
    for (k, sigma) in out.sigma.iter().enumerate() {
        println!("candidate {}  sigma {sigma:.4}  decodes to {:?}", k + 1, table.decode(*sigma));
    }
    match out.counts() {
        Some(counts) => println!("tally       {counts:?}"),
        None => println!("tally       FAIL ({:?})", out.failure_cause),
    }
    println!("{} transcript events", out.transcript.len());
    Ok(())
}
