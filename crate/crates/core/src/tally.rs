//! Statistical decoding of the tally.
//!
//! With `v` voters choosing a candidate, each public parity bit for that
//! candidate is odd with probability `p_v`, where `p_0 = 0` and
//! `p_{v+1} = p_v (1 - 1/n) + (1 - p_v) / n`. The observed fraction of odd
//! parities `σ` is mapped back to the `v` whose `p_v` lies within
//! `1 / (2e²n)` of it.
//!
//! Near `v = n` adjacent windows overlap (the gap `(1 - 2p_v)/n` drops below
//! twice the tolerance), so decoding picks the nearest `p_v` inside the
//! tolerance and fails on an exact tie.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::channels::PartyId;
use crate::error::{Error, Result};
use crate::primitives::VoteMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderTable {
    n: usize,
    probs: Vec<f64>,
    tolerance: f64,
}

impl DecoderTable {
    pub fn new(n: usize) -> Result<Self> {
        check_voters(n)?;
        let step = 1.0 / n as f64;
        let mut probs = Vec::with_capacity(n + 1);
        let mut p = 0.0f64;
        probs.push(p);
        for _ in 0..n {
            p = p * (1.0 - step) + (1.0 - p) * step;
            probs.push(p);
        }
        Ok(Self {
            n,
            probs,
            tolerance: decode_tolerance(n),
        })
    }

    pub fn voters(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Open interval `(p_v - tol, p_v + tol)`.
    pub fn window(&self, v: usize) -> (f64, f64) {
        (self.probs[v] - self.tolerance, self.probs[v] + self.tolerance)
    }

    pub fn decode(&self, sigma: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        let mut tied = false;
        for (v, &p) in self.probs.iter().enumerate() {
            let d = (sigma - p).abs();
            if d >= self.tolerance {
                continue;
            }
            match best {
                Some((_, bd)) if d > bd => {}
                Some((_, bd)) if d == bd => tied = true,
                _ => {
                    best = Some((v, d));
                    tied = false;
                }
            }
        }
        if tied {
            None
        } else {
            best.map(|(v, _)| v)
        }
    }

    /// Pairs `(v, v + 1)` whose decode windows intersect.
    pub fn overlapping_windows(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .filter(|&v| self.window(v).1 > self.window(v + 1).0)
            .map(|v| (v, v + 1))
            .collect()
    }

    /// CSV with columns `v,p_v,window_low,window_high`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["v", "p_v", "window_low", "window_high"])?;
        for v in 0..=self.n {
            let (lo, hi) = self.window(v);
            w.write_record([v.to_string(), self.probs[v].to_string(), lo.to_string(), hi.to_string()])?;
        }
        w.flush()
    }
}

fn check_voters(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::param(format!("decoder needs n >= 3, got {n}")));
    }
    Ok(())
}

/// `1 / (2e²n)`.
pub fn decode_tolerance(n: usize) -> f64 {
    1.0 / (2.0 * std::f64::consts::E.powi(2) * n as f64)
}

/// Probability that a candidate's public parity bit is odd when `v` of `n`
/// voters chose it.
pub fn p_of_v(v: usize, n: usize) -> Result<f64> {
    check_voters(n)?;
    if v > n {
        return Err(Error::param(format!("v = {v} exceeds n = {n}")));
    }
    Ok(DecoderTable::new(n)?.probs[v])
}

/// `p_{v+1} - p_v`.
pub fn gap(v: usize, n: usize) -> Result<f64> {
    check_voters(n)?;
    if v >= n {
        return Err(Error::param(format!("gap needs v < n, got v = {v}, n = {n}")));
    }
    let t = DecoderTable::new(n)?;
    Ok(t.probs[v + 1] - t.probs[v])
}

pub fn decode_count(sigma: f64, n: usize) -> Option<usize> {
    DecoderTable::new(n).ok()?.decode(sigma)
}

/// Public parities `v[k]_j` and their per-candidate means `σ[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TallyAccumulator {
    pub parities: VoteMatrix,
    pub sigma: Vec<f64>,
}

impl TallyAccumulator {
    pub fn from_parities(parities: VoteMatrix) -> Self {
        let positions = parities.positions().max(1) as f64;
        let sigma = parities
            .rows()
            .iter()
            .map(|r| r.count_ones() as f64 / positions)
            .collect();
        Self { parities, sigma }
    }
}

/// XORs every participant's broadcast `q` bits (each `candidates × positions`
/// long, candidate-major) into the public parities.
pub fn aggregate_parities(
    contributions: &[BitString],
    expected_participants: usize,
    candidates: usize,
    positions: usize,
) -> Result<TallyAccumulator> {
    if contributions.len() != expected_participants {
        return Err(Error::ProtocolFailure(format!(
            "{} of {expected_participants} parity contributions received",
            contributions.len()
        )));
    }
    let mut v = BitString::zeros(candidates * positions);
    for c in contributions {
        if c.len() != v.len() {
            return Err(Error::ProtocolFailure(format!(
                "parity contribution has {} bits, expected {}",
                c.len(),
                v.len()
            )));
        }
        v ^= c;
    }
    Ok(TallyAccumulator::from_parities(VoteMatrix::from_bits(&v, candidates, positions)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TallyFailure {
    /// No count within tolerance for this (1-based) candidate.
    NoDecode { candidate: usize },
    SumMismatch { sum: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyResult {
    /// `y[k]` per candidate, `None` when the tally failed.
    pub counts: Option<Vec<usize>>,
    pub failure: Option<TallyFailure>,
    pub revoked: Vec<PartyId>,
}

impl TallyResult {
    pub fn failed(&self) -> bool {
        self.counts.is_none()
    }
}

pub fn finalize_tally(acc: &TallyAccumulator, counted_voters: usize, n: usize) -> TallyResult {
    let fail = |f| TallyResult {
        counts: None,
        failure: Some(f),
        revoked: Vec::new(),
    };
    let table = match DecoderTable::new(n) {
        Ok(t) => t,
        Err(_) => return fail(TallyFailure::NoDecode { candidate: 1 }),
    };
    let mut counts = Vec::with_capacity(acc.sigma.len());
    for (k, &sigma) in acc.sigma.iter().enumerate() {
        match table.decode(sigma) {
            Some(v) => counts.push(v),
            None => return fail(TallyFailure::NoDecode { candidate: k + 1 }),
        }
    }
    let sum: usize = counts.iter().sum();
    if sum != counted_voters {
        return fail(TallyFailure::SumMismatch {
            sum,
            expected: counted_voters,
        });
    }
    TallyResult {
        counts: Some(counts),
        failure: None,
        revoked: Vec::new(),
    }
}
