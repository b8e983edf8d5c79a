//! Equality test of two distributed bits held by the same shareholders.
//!
//! Holder `i` publishes `c_i = a_i ⊕ b_i`; the bits are equal iff the XOR of
//! all `c_i` is zero. Only `a ⊕ b` is revealed.

use crate::bits::{Bit, BitString};
use crate::error::{Error, Result};

use super::sharing::ShareVector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityOutcome {
    pub equal: Bit,
    /// The published `c_i`, in holder order.
    pub revealed: Vec<Bit>,
}

/// `broadcast` receives every holder's `c_i` and returns what the
/// simultaneous broadcast delivered (`None` for a holder that never
/// submitted).
pub fn distributed_bit_equality<F>(a: &ShareVector, b: &ShareVector, broadcast: F) -> Result<EqualityOutcome>
where
    F: FnOnce(Vec<Bit>) -> Vec<Option<Bit>>,
{
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::param("equality test needs two non-empty sharings of equal size"));
    }
    let contributions: Vec<Bit> = a.shares().iter().zip(b.shares()).map(|(x, y)| x ^ y).collect();
    let delivered = broadcast(contributions);
    if delivered.len() != a.len() {
        return Err(Error::ProtocolFailure("equality broadcast lost a holder".into()));
    }
    let revealed = delivered
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| Error::ProtocolFailure(format!("holder {} did not submit", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let parity = revealed.iter().fold(false, |acc, &c| acc ^ c);
    Ok(EqualityOutcome {
        equal: !parity,
        revealed,
    })
}

/// One holder's contribution for a whole batch of equality tests.
pub fn equality_contribution(a: &BitString, b: &BitString) -> BitString {
    a ^ b
}

/// Position `t` of the result is set iff test `t` passed.
pub fn equality_results(revealed: &[BitString]) -> Result<BitString> {
    let xor = super::sharing::reconstruct_bits(revealed)?;
    Ok(xor.iter().map(|b| !b).collect())
}
