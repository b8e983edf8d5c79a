//! Wire format of an authority's tally announcement.
//!
//! A tally of `c` counted ballots over `m` candidates is one of the
//! `C(c + m − 1, m − 1)` compositions of `c` into `m` parts. It is sent as its
//! lexicographic rank; the next value after the last rank means "failed".
//! Vectors that are not compositions of `c` cannot be expressed and go out as
//! the failure codeword.

use crate::bits::BitString;
use crate::primitives::binomial;

fn compositions(total: usize, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    binomial((total + parts - 1) as u64, (parts - 1) as u64).expect("composition count overflows")
}

/// Bits per announcement: `⌈log₂(C(c + m − 1, m − 1) + 1)⌉`, at least one.
pub fn announcement_bits(counted: usize, candidates: usize) -> usize {
    let codes = compositions(counted, candidates) + 1;
    ((128 - (codes - 1).leading_zeros()) as usize).max(1)
}

fn rank(counts: &[usize], counted: usize) -> Option<u128> {
    if counts.iter().sum::<usize>() != counted {
        return None;
    }
    let m = counts.len();
    let mut rank = 0u128;
    let mut left = counted;
    for (i, &c) in counts.iter().enumerate().take(m.saturating_sub(1)) {
        for x in 0..c {
            rank += compositions(left - x, m - i - 1);
        }
        left -= c;
    }
    Some(rank)
}

fn unrank(mut rank: u128, counted: usize, m: usize) -> Vec<usize> {
    let mut counts = Vec::with_capacity(m);
    let mut left = counted;
    for i in 0..m.saturating_sub(1) {
        let mut x = 0;
        loop {
            let block = compositions(left - x, m - i - 1);
            if rank < block {
                break;
            }
            rank -= block;
            x += 1;
        }
        counts.push(x);
        left -= x;
    }
    if m > 0 {
        counts.push(left);
    }
    counts
}

pub fn encode_announcement(announced: Option<&[usize]>, counted: usize, candidates: usize) -> BitString {
    let fail = compositions(counted, candidates);
    let code = announced
        .filter(|c| c.len() == candidates)
        .and_then(|c| rank(c, counted))
        .unwrap_or(fail);
    let width = announcement_bits(counted, candidates);
    BitString::from_bits((0..width).rev().map(|i| (code >> i) & 1 == 1))
}

/// `None` for the failure codeword and for values past it.
pub fn decode_announcement(bits: &BitString, counted: usize, candidates: usize) -> Option<Vec<usize>> {
    let code = bits.iter().fold(0u128, |acc, b| (acc << 1) | u128::from(b));
    (code < compositions(counted, candidates)).then(|| unrank(code, counted, candidates))
}
