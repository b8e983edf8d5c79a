//! Plaintext votes: one row of `n²s` bits per candidate.

use rand::seq::index;
use rand::RngCore;

use super::permutation::VoteEncryption;
use super::sharing::share_bits;
use crate::bits::BitString;
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};

/// An `m × n²s` bit matrix. Row `k` (0-based) holds the bits a voter
/// contributes for candidate `k + 1`.
///
/// Authorities hold their shares of a vote in the same shape, since
/// permutations and equality tests act on shares position by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VoteMatrix {
    rows: Vec<BitString>,
}

impl VoteMatrix {
    pub fn zeros(candidates: usize, positions: usize) -> Self {
        Self {
            rows: vec![BitString::zeros(positions); candidates],
        }
    }

    pub fn from_rows(rows: Vec<BitString>) -> Result<Self> {
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len()) {
                return Err(Error::param("vote matrix rows differ in length"));
            }
        }
        Ok(Self { rows })
    }

    pub fn candidates(&self) -> usize {
        self.rows.len()
    }

    pub fn positions(&self) -> usize {
        self.rows.first().map_or(0, BitString::len)
    }

    pub fn row(&self, k: usize) -> &BitString {
        &self.rows[k]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut BitString {
        &mut self.rows[k]
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(BitString::count_ones).sum()
    }

    /// Row-major flattening, candidate by candidate.
    pub fn to_bits(&self) -> BitString {
        let mut out = BitString::zeros(0);
        for r in &self.rows {
            out.extend_from(r);
        }
        out
    }

    pub fn from_bits(bits: &BitString, candidates: usize, positions: usize) -> Result<Self> {
        if bits.len() != candidates * positions {
            return Err(Error::param(format!(
                "expected {} bits for a {candidates}×{positions} matrix, got {}",
                candidates * positions,
                bits.len()
            )));
        }
        Ok(Self {
            rows: (0..candidates).map(|k| bits.slice(k * positions, positions)).collect(),
        })
    }

    pub fn xor_assign(&mut self, other: &VoteMatrix) -> Result<()> {
        if self.candidates() != other.candidates() || self.positions() != other.positions() {
            return Err(Error::param("xor of vote matrices with different shapes"));
        }
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a ^= b;
        }
        Ok(())
    }

    fn check_shape(&self, cfg: &ProtocolConfig) -> Result<()> {
        if self.candidates() != cfg.effective_candidates() || self.positions() != cfg.positions() {
            return Err(Error::param(format!(
                "vote matrix is {}×{}, configuration expects {}×{}",
                self.candidates(),
                self.positions(),
                cfg.effective_candidates(),
                cfg.positions()
            )));
        }
        Ok(())
    }
}

/// Honest vote for candidate `choice` (1-based): `ns` ones at uniformly
/// random positions of that row, every other row zero.
pub fn build_vote_matrix<R: RngCore + ?Sized>(
    choice: usize,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<VoteMatrix> {
    cfg.validate()?;
    let m = cfg.effective_candidates();
    if !(1..=m).contains(&choice) {
        return Err(Error::InvalidBallot(format!("candidate {choice} not in 1..={m}")));
    }
    let mut vote = VoteMatrix::zeros(m, cfg.positions());
    mark_row(&mut vote, choice - 1, cfg.marked(), rng);
    Ok(vote)
}

/// Sets `count` uniformly chosen positions of row `k` to one.
pub(crate) fn mark_row<R: RngCore + ?Sized>(vote: &mut VoteMatrix, k: usize, count: usize, rng: &mut R) {
    let positions = vote.positions();
    for j in index::sample(rng, positions, count.min(positions)) {
        vote.row_mut(k).set(j, true);
    }
}

/// True iff exactly one row holds `ns` ones and all others are zero.
pub fn is_correct_vote(matrix: &VoteMatrix, cfg: &ProtocolConfig) -> Result<bool> {
    matrix.check_shape(cfg)?;
    let mut marked_rows = 0;
    for row in matrix.rows() {
        match row.count_ones() {
            0 => {}
            c if c == cfg.marked() => marked_rows += 1,
            _ => return Ok(false),
        }
    }
    Ok(marked_rows == 1)
}

/// Row `k` moves to `candidate_perm(k)` and inside every row position `j`
/// moves to `position_perm(j)`.
pub fn permute_vote(matrix: &VoteMatrix, enc: &VoteEncryption) -> Result<VoteMatrix> {
    if enc.candidate_perm.len() != matrix.candidates() || enc.position_perm.len() != matrix.positions() {
        return Err(Error::param("encryption does not match the vote shape"));
    }
    let mut rows = vec![BitString::zeros(0); matrix.candidates()];
    for (k, row) in matrix.rows().iter().enumerate() {
        rows[enc.candidate_perm.apply(k)] = enc.position_perm.permute_bits(row)?;
    }
    Ok(VoteMatrix { rows })
}

/// XOR-shares an entire matrix among `num_shares` holders.
pub fn share_matrix<R: RngCore + ?Sized>(
    matrix: &VoteMatrix,
    num_shares: usize,
    rng: &mut R,
) -> Result<Vec<VoteMatrix>> {
    let flat = share_bits(&matrix.to_bits(), num_shares, rng)?;
    flat.iter()
        .map(|b| VoteMatrix::from_bits(b, matrix.candidates(), matrix.positions()))
        .collect()
}
