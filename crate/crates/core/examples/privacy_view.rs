//! What a coalition of voters sees. For n = 3 with voter 1 honest, the
//! other two voters' view of the casting phase is the same random variable
//! whichever candidate voter 1 picks. We estimate the distribution of a few
//! coordinates (from both candidate rows) of the two shares voter 1 sends
//! the coalition, under each ballot, and compare.
//!
//!     cargo run --release --example privacy_view

use std::collections::BTreeMap;

use vote_sim::channels::{ChannelKind, PartyId};
use vote_sim::protocols::{ballots_from_choices, run_protocol1};
use vote_sim::ProtocolConfig;

/// Two positions of each candidate row (rows are n²s = 9 bits long).
const COORDS: [usize; 4] = [0, 1, 9, 10];

fn view_histogram(choice: usize, trials: u64) -> anyhow::Result<BTreeMap<String, u64>> {
    let cfg = ProtocolConfig::new(3, 2, 1, 1);
    let coalition = [PartyId::voter(2), PartyId::voter(3)];
    let mut hist = BTreeMap::new();
    for seed in 0..trials {
        let out = run_protocol1(&cfg, &ballots_from_choices(&[choice, 1, 2]), &[], seed)?;
        let key: String = out
            .transcript
            .view_for(&coalition)
            .iter()
            .filter(|e| e.kind == ChannelKind::Private && e.sender == Some(PartyId::voter(1)))
            .filter_map(|e| e.payload.as_ref())
            .flat_map(|p| COORDS.iter().map(move |&i| if p.get(i) { '1' } else { '0' }))
            .collect();
        *hist.entry(key).or_insert(0) += 1;
    }
    Ok(hist)
}

fn main() -> anyhow::Result<()> {
    let trials = 20_000;
    let a = view_histogram(1, trials)?;
    let b = view_histogram(2, trials)?;
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    let tv: f64 = keys
        .iter()
        .map(|k| {
            let pa = *a.get(*k).unwrap_or(&0) as f64 / trials as f64;
            let pb = *b.get(*k).unwrap_or(&0) as f64 / trials as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
        / 2.0;
    // 256 cells and 20000 samples per side: sampling noise alone gives about 0.06.
    println!("{} distinct views; total variation between the two ballots {tv:.4}", keys.len());
    Ok(())
}
