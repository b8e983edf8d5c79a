//! Permutations and the two-permutation vote encryption used by the
//! cut-and-choose step.

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// A bijection on `0..len`, stored as its image array: `i ↦ map[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<u32>,
}

impl Permutation {
    pub fn new(map: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &x in &map {
            let x = x as usize;
            if x >= map.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::param(format!("not a permutation of 0..{}", map.len())));
            }
        }
        Ok(Self { map })
    }

    pub fn identity(len: usize) -> Self {
        Self {
            map: (0..len as u32).collect(),
        }
    }

    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut map: Vec<u32> = (0..len as u32).collect();
        map.shuffle(rng);
        Self { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Self { map: inv }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Permutation) -> Result<Self> {
        if self.len() != first.len() {
            return Err(Error::param("composing permutations of different sizes"));
        }
        Ok(Self {
            map: first.map.iter().map(|&x| self.map[x as usize]).collect(),
        })
    }

    /// Moves bit `i` of `bits` to position `self(i)`.
    pub fn permute_bits(&self, bits: &BitString) -> Result<BitString> {
        if bits.len() != self.len() {
            return Err(Error::param(format!(
                "permutation of {} positions applied to {} bits",
                self.len(),
                bits.len()
            )));
        }
        let mut out = BitString::zeros(bits.len());
        for i in bits.ones() {
            out.set(self.apply(i), true);
        }
        Ok(out)
    }

    /// Wire form: `u32` length then each image as `u32`, little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 4 * self.map.len());
        out.extend_from_slice(&(self.map.len() as u32).to_le_bytes());
        for &x in &self.map {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    /// Decodes a prefix of `bytes`, returning the permutation and the number
    /// of bytes consumed.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Self, usize)> {
        let word = |i: usize| -> Result<u32> {
            bytes
                .get(i * 4..i * 4 + 4)
                .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
                .ok_or_else(|| Error::param("truncated permutation encoding"))
        };
        let len = word(0)? as usize;
        let map = (1..=len).map(word).collect::<Result<Vec<_>>>()?;
        Ok((Self::new(map)?, 4 + 4 * len))
    }

    /// Bits on the wire for a permutation of `len` elements.
    pub fn encoded_bits(len: usize) -> usize {
        32 * (1 + len)
    }
}

/// Candidate reordering plus one position reordering shared by all rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VoteEncryption {
    pub candidate_perm: Permutation,
    pub position_perm: Permutation,
}

impl VoteEncryption {
    pub fn identity(candidates: usize, positions: usize) -> Self {
        Self {
            candidate_perm: Permutation::identity(candidates),
            position_perm: Permutation::identity(positions),
        }
    }

    pub fn random<R: RngCore + ?Sized>(candidates: usize, positions: usize, rng: &mut R) -> Self {
        Self {
            candidate_perm: Permutation::random(candidates, rng),
            position_perm: Permutation::random(positions, rng),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            candidate_perm: self.candidate_perm.inverse(),
            position_perm: self.position_perm.inverse(),
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &VoteEncryption) -> Result<Self> {
        Ok(Self {
            candidate_perm: self.candidate_perm.after(&first.candidate_perm)?,
            position_perm: self.position_perm.after(&first.position_perm)?,
        })
    }

    /// Candidate permutation then position permutation, as one bit string.
    pub fn to_bits(&self) -> BitString {
        let mut bytes = self.candidate_perm.to_bytes();
        bytes.extend(self.position_perm.to_bytes());
        BitString::from_bytes(&bytes, bytes.len() * 8)
    }

    pub fn from_bits(bits: &BitString) -> Result<Self> {
        if !bits.len().is_multiple_of(8) {
            return Err(Error::param("encryption encoding is not byte aligned"));
        }
        let bytes = bits.to_bytes();
        let (candidate_perm, used) = Permutation::from_bytes(&bytes)?;
        let (position_perm, rest) = Permutation::from_bytes(&bytes[used..])?;
        if used + rest != bytes.len() {
            return Err(Error::param("trailing bytes after encryption encoding"));
        }
        Ok(Self {
            candidate_perm,
            position_perm,
        })
    }

    pub fn encoded_bits(candidates: usize, positions: usize) -> usize {
        Permutation::encoded_bits(candidates) + Permutation::encoded_bits(positions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn wire_format_is_length_prefixed_le() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(p.to_bytes(), vec![3, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(Permutation::encoded_bits(3), p.to_bytes().len() * 8);
    }

    #[test]
    fn truncated_decoding_fails() {
        let bytes = Permutation::new(vec![1, 0]).unwrap().to_bytes();
        assert!(Permutation::from_bytes(&bytes[..7]).is_err());
    }

    proptest! {
        #[test]
        fn encryption_bits_round_trip(m in 1usize..6, l in 1usize..50, seed in any::<u64>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let enc = VoteEncryption::random(m, l, &mut rng);
            let bits = enc.to_bits();
            prop_assert_eq!(bits.len(), VoteEncryption::encoded_bits(m, l));
            prop_assert_eq!(VoteEncryption::from_bits(&bits).unwrap(), enc);
        }

        #[test]
        fn inverse_composes_to_identity(l in 1usize..40, seed in any::<u64>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let p = Permutation::random(l, &mut rng);
            prop_assert_eq!(p.inverse().after(&p).unwrap(), Permutation::identity(l));
        }
    }
}
