//! Building blocks: XOR sharing, votes, vote encryption, common randomness
//! and the distributed-bit equality test.

mod equality;
mod permutation;
mod randomness;
pub(crate) mod sharing;
mod vote;

pub use equality::{distributed_bit_equality, equality_contribution, equality_results, EqualityOutcome};
pub use permutation::{Permutation, VoteEncryption};
pub use randomness::{binomial, common_random_bits, random_s_subset, subset_chunk_bits};
pub use sharing::{make_distributed_bit, reconstruct, reconstruct_bits, share_bits, ShareVector};
pub use vote::{build_vote_matrix, is_correct_vote, permute_vote, share_matrix, VoteMatrix};

pub(crate) use vote::mark_row;
