//! r-of-r XOR sharing ("distributed bits").

use rand::RngCore;

use crate::bits::{Bit, BitString};
use crate::error::{Error, Result};

/// One distributed bit: share `i` is held by shareholder `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShareVector(Vec<Bit>);

impl ShareVector {
    pub fn new(shares: Vec<Bit>) -> Self {
        Self(shares)
    }

    pub fn shares(&self) -> &[Bit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Splits `value` into `num_shares` XOR shares. The first `num_shares - 1`
/// shares are independent uniform bits (the low bit of one `next_u32` draw
/// each); the last one is forced so the parity equals `value`.
pub fn make_distributed_bit<R: RngCore + ?Sized>(
    value: Bit,
    num_shares: usize,
    rng: &mut R,
) -> Result<ShareVector> {
    if num_shares == 0 {
        return Err(Error::param("a distributed bit needs at least one share"));
    }
    let mut shares: Vec<Bit> = (0..num_shares - 1).map(|_| rng.next_u32() & 1 == 1).collect();
    let forced = shares.iter().fold(value, |acc, &b| acc ^ b);
    shares.push(forced);
    Ok(ShareVector(shares))
}

pub fn reconstruct(shares: &ShareVector) -> Result<Bit> {
    if shares.is_empty() {
        return Err(Error::param("cannot reconstruct from zero shares"));
    }
    Ok(shares.0.iter().fold(false, |acc, &b| acc ^ b))
}

/// Shares every bit of `value` independently, returning one string per
/// shareholder. Bit `t` of the returned strings forms the distributed bit for
/// bit `t` of `value`, built the same way as [`make_distributed_bit`].
pub fn share_bits<R: RngCore + ?Sized>(
    value: &BitString,
    num_shares: usize,
    rng: &mut R,
) -> Result<Vec<BitString>> {
    if num_shares == 0 {
        return Err(Error::param("a distributed bit needs at least one share"));
    }
    let mut shares: Vec<BitString> = (0..num_shares - 1)
        .map(|_| BitString::random(value.len(), rng))
        .collect();
    let mut forced = value.clone();
    for s in &shares {
        forced ^= s;
    }
    shares.push(forced);
    Ok(shares)
}

/// XOR of equal-length share strings.
pub fn reconstruct_bits(shares: &[BitString]) -> Result<BitString> {
    let (first, rest) = shares
        .split_first()
        .ok_or_else(|| Error::param("cannot reconstruct from zero shares"))?;
    let mut out = first.clone();
    for s in rest {
        if s.len() != out.len() {
            return Err(Error::param("share strings differ in length"));
        }
        out ^= s;
    }
    Ok(out)
}
