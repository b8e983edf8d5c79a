//! Common random bits and the subset choice derived from them.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Position-wise XOR of every authority's broadcast contribution. Uniform
/// whenever at least one contribution is uniform and independent of the rest.
pub fn common_random_bits(contributions: &[BitString]) -> Result<BitString> {
    let (first, rest) = contributions
        .split_first()
        .ok_or_else(|| Error::ProtocolFailure("no randomness contributions".into()))?;
    let mut out = first.clone();
    for c in rest {
        if c.len() != out.len() {
            return Err(Error::ProtocolFailure(format!(
                "randomness contributions differ in length ({} vs {})",
                c.len(),
                out.len()
            )));
        }
        out ^= c;
    }
    Ok(out)
}

/// `C(n, k)`, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n.checked_sub(k)?);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.checked_mul(n as u128 - i)? / (i + 1);
    }
    Some(acc)
}

/// Width of one rejection-sampling chunk: `⌈log₂ C(2s, s)⌉`.
pub fn subset_chunk_bits(s: usize) -> Result<usize> {
    let total = subset_count(s)?;
    Ok((total - 1u32).bits() as usize)
}

fn subset_count(s: usize) -> Result<BigUint> {
    if s == 0 {
        return Err(Error::param("subset size must be at least 1"));
    }
    Ok(big_binomial(2 * s, s))
}

fn big_binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Chooses `s` of `2s` items (0-based) from shared entropy.
///
/// The entropy is read as consecutive chunks of [`subset_chunk_bits`] bits,
/// most significant first. The first chunk whose value is below `C(2s, s)` is
/// unranked in lexicographic order; larger values are rejected. Running out of
/// chunks yields [`Error::NeedsMoreRandomness`].
pub fn random_s_subset(entropy: &BitString, s: usize) -> Result<BTreeSet<usize>> {
    let total = subset_count(s)?;
    let width = subset_chunk_bits(s)?;
    let mut offset = 0;
    while offset + width <= entropy.len() {
        let rank = read_big(entropy, offset, width);
        if rank < total {
            return Ok(unrank_subset(rank, 2 * s, s));
        }
        offset += width;
    }
    Err(Error::NeedsMoreRandomness {
        available: entropy.len(),
        chunk_bits: width,
    })
}

fn read_big(bits: &BitString, start: usize, width: usize) -> BigUint {
    let mut out = BigUint::zero();
    for i in start..start + width {
        out <<= 1;
        if bits.get(i) {
            out += 1u32;
        }
    }
    out
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
fn unrank_subset(mut rank: BigUint, n: usize, k: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    if k == 0 {
        return out;
    }
    // `with_e` = C(a, b): subsets whose smallest remaining element is `e`,
    // with a = n - e - 1 and b = remaining - 1.
    let (mut a, mut b) = (n - 1, k - 1);
    let mut with_e = big_binomial(a, b);
    for e in 0..n {
        if rank < with_e {
            out.insert(e);
            if b == 0 {
                break;
            }
            // C(a - 1, b - 1) = C(a, b) · b / a
            with_e = with_e * b / a;
            b -= 1;
        } else {
            rank -= &with_e;
            if a > b {
                // C(a - 1, b) = C(a, b) · (a - b) / a
                with_e = with_e * (a - b) / a;
            }
        }
        a = a.saturating_sub(1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::BTreeMap;

    fn bits(s: &str) -> BitString {
        BitString::from_str_bits(s)
    }

    #[test]
    fn xor_examples() {
        assert_eq!(common_random_bits(&[bits("0110"), bits("0000")]).unwrap(), bits("0110"));
        assert_eq!(common_random_bits(&[bits("1111"), bits("1111")]).unwrap(), bits("0000"));
    }

    #[test]
    fn length_mismatch_is_a_failure() {
        assert!(matches!(
            common_random_bits(&[bits("01"), bits("011")]),
            Err(Error::ProtocolFailure(_))
        ));
    }

    #[test]
    fn one_honest_contributor_keeps_output_uniform() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let mut rng = ChaCha20Rng::seed_from_u64(2024);
        let adversarial = bits("1011");
        let mut counts = [0usize; 16];
        let samples = 10_000;
        for _ in 0..samples {
            let honest = BitString::random(4, &mut rng);
            let out = common_random_bits(&[honest, adversarial.clone()]).unwrap();
            counts[out.read_uint(0, 4) as usize] += 1;
        }
        let expected = samples as f64 / 16.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let crit = ChiSquared::new(15.0).unwrap().inverse_cdf(0.999);
        assert!(chi2 < crit, "chi2 {chi2} >= {crit}");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), Some(6));
        assert_eq!(binomial(16, 8), Some(12870));
        assert_eq!(binomial(3, 5), None);
        assert_eq!(subset_chunk_bits(1).unwrap(), 1);
        assert_eq!(subset_chunk_bits(2).unwrap(), 3);
        assert_eq!(subset_chunk_bits(8).unwrap(), 14);
    }

    #[test]
    fn single_element_subsets() {
        assert_eq!(random_s_subset(&bits("0"), 1).unwrap(), BTreeSet::from([0]));
        assert_eq!(random_s_subset(&bits("1"), 1).unwrap(), BTreeSet::from([1]));
    }

    #[test]
    fn cardinality_at_eight() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for _ in 0..200 {
            let e = BitString::random(14 * 8, &mut rng);
            match random_s_subset(&e, 8) {
                Ok(set) => {
                    assert_eq!(set.len(), 8);
                    assert!(set.iter().all(|&i| i < 16));
                }
                Err(Error::NeedsMoreRandomness { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn uniform_over_accepted_chunks_at_two() {
        // Every 3-bit chunk value 0..8: 0..6 accepted, each subset exactly once.
        let mut seen: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        let mut rejected = 0;
        for v in 0..8u64 {
            let mut e = BitString::zeros(0);
            e.push_uint(v, 3);
            match random_s_subset(&e, 2) {
                Ok(set) => *seen.entry(set).or_default() += 1,
                Err(Error::NeedsMoreRandomness { .. }) => rejected += 1,
                Err(e) => panic!("{e}"),
            }
        }
        assert_eq!(rejected, 2);
        assert_eq!(seen.len(), 6);
        assert!(seen.values().all(|&c| c == 1));

        // Two chunks: every subset reached 8 + 2 = 10 times out of 64 strings.
        let mut seen: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        for v in 0..64u64 {
            let mut e = BitString::zeros(0);
            e.push_uint(v, 6);
            if let Ok(set) = random_s_subset(&e, 2) {
                *seen.entry(set).or_default() += 1;
            }
        }
        assert_eq!(seen.len(), 6);
        assert!(seen.values().all(|&c| c == 10));
    }

    #[test]
    fn deterministic_in_entropy() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for s in 1..6 {
            let e = BitString::random(200, &mut rng);
            assert_eq!(random_s_subset(&e, s).unwrap(), random_s_subset(&e.clone(), s).unwrap());
        }
    }

    #[test]
    fn unrank_is_a_bijection() {
        for s in 1..6usize {
            let total = binomial(2 * s as u64, s as u64).unwrap();
            let all: BTreeSet<BTreeSet<usize>> =
                (0..total).map(|r| unrank_subset(BigUint::from(r), 2 * s, s)).collect();
            assert_eq!(all.len() as u128, total);
            assert!(all.iter().all(|set| set.len() == s));
        }
    }

    #[test]
    fn unrank_matches_brute_force_order() {
        // Lexicographic enumeration of 3-subsets of 0..6 by nested loops.
        let mut expected = Vec::new();
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    expected.push(BTreeSet::from([a, b, c]));
                }
            }
        }
        let got: Vec<_> = (0..20u32).map(|r| unrank_subset(BigUint::from(r), 6, 3)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn large_security_parameters() {
        assert_eq!(subset_chunk_bits(500).unwrap(), 995);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let e = BitString::random(995 * 8, &mut rng);
        let set = random_s_subset(&e, 500).unwrap();
        assert_eq!(set.len(), 500);
        assert!(set.iter().all(|&i| i < 1000));
        // Rank 0 is the first half, the largest rank the second half.
        assert_eq!(unrank_subset(BigUint::zero(), 1000, 500), (0..500).collect());
        let last = big_binomial(1000, 500) - 1u32;
        assert_eq!(unrank_subset(last, 1000, 500), (500..1000).collect());
    }

    #[test]
    fn empty_entropy_needs_more() {
        assert!(matches!(
            random_s_subset(&bits(""), 1),
            Err(Error::NeedsMoreRandomness { .. })
        ));
    }
}
