//! Building blocks of the cut-and-choose step: XOR-combined coins, a
//! uniform s-subset of 2s copies drawn from them, and the batched equality
//! test on shared bits.
//!
//!     cargo run --release --example common_randomness

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use vote_sim::primitives::{
    common_random_bits, equality_contribution, equality_results, random_s_subset, share_bits, subset_chunk_bits,
};
use vote_sim::BitString;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let s = 4;
    let width = subset_chunk_bits(s)?;
    // Any one honest contributor makes the XOR uniform.
    let coins: Vec<BitString> = (0..3).map(|_| BitString::random(8 * width, &mut rng)).collect();
    let entropy = common_random_bits(&coins)?;
    let opened = random_s_subset(&entropy, s)?;
    println!("{width}-bit chunks; open copies {opened:?} out of {}", 2 * s);

    // Three holders test a = b bit by bit; only a xor b becomes public.
    let a = BitString::from_str_bits("10110");
    let b = BitString::from_str_bits("10011");
    let sa = share_bits(&a, 3, &mut rng)?;
    let sb = share_bits(&b, 3, &mut rng)?;
    let published: Vec<BitString> = sa.iter().zip(&sb).map(|(x, y)| equality_contribution(x, y)).collect();
    println!("a = {a}, b = {b}, equal per bit {}", equality_results(&published)?);
    Ok(())
}
