//! The probability that a column of the parity matrix is odd when `v` of
//! `n` voters picked a candidate, and the windows used to invert it.
//!
//!     cargo run --release --example decoder_table [n]

use vote_sim::tally::{decode_tolerance, gap, DecoderTable};

fn main() -> anyhow::Result<()> {
    let n: usize = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(6);
    let table = DecoderTable::new(n)?;
    println!("n = {n}, tolerance {:.6}", decode_tolerance(n));
    println!("{:>3} {:>10} {:>10} {:>10} {:>10}", "v", "p_v", "low", "high", "gap");
    for v in 0..=n {
        let (lo, hi) = table.window(v);
        let g = if v < n { format!("{:.6}", gap(v, n)?) } else { "-".into() };
        println!("{v:>3} {:>10.6} {lo:>10.6} {hi:>10.6} {g:>10}", table.probs()[v]);
    }
    let overlaps = table.overlapping_windows();
    if !overlaps.is_empty() {
        println!("overlapping windows (nearest center wins): {overlaps:?}");
    }
    table.write_csv(std::io::sink())?;
    Ok(())
}
