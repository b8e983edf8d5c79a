//! Monte Carlo experiments over the protocols: repeated seeded runs,
//! summary statistics, accounting checks and parameter sweeps.

mod accounting;
mod file;
mod sweep;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::AdversarySpec;
use crate::channels::{PartyId, Transcript};
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::protocols::{ballots_from_choices, party_rng, run_protocol, ProtocolKind, RunRecord};
use crate::tally::DecoderTable;

pub use accounting::{verify_accounting, AccountingCheck, CheckRow};
pub use file::FileConfig;
pub use sweep::{sweep, write_sweep_csv, SweepParameter, SweepRow};

/// Stream tag for per-trial ballot draws.
const BALLOT_STREAM: u64 = 4 << 60;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum BallotSpec {
    /// Ballot `i` belongs to voter `i + 1`.
    Fixed(Vec<usize>),
    /// Every voter picks a real candidate uniformly, fresh in every trial.
    Uniform,
}

impl BallotSpec {
    pub fn draw(&self, cfg: &ProtocolConfig, trial_seed: u64) -> Vec<usize> {
        match self {
            BallotSpec::Fixed(c) => c.clone(),
            BallotSpec::Uniform => {
                let mut rng = party_rng(trial_seed, BALLOT_STREAM);
                (0..cfg.voters).map(|_| rng.gen_range(1..=cfg.candidates)).collect()
            }
        }
    }
}

impl FromStr for BallotSpec {
    type Err = Error;

    /// `1,2,2,1` or `dist:uniform`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "dist:uniform" {
            return Ok(BallotSpec::Uniform);
        }
        s.split(',')
            .map(|c| {
                c.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::config(format!("bad ballot `{c}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(BallotSpec::Fixed)
    }
}

impl fmt::Display for BallotSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BallotSpec::Uniform => f.write_str("dist:uniform"),
            BallotSpec::Fixed(c) => {
                let parts: Vec<String> = c.iter().map(usize::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl From<BallotSpec> for String {
    fn from(b: BallotSpec) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BallotSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub protocol: ProtocolKind,
    pub params: ProtocolConfig,
    pub ballots: BallotSpec,
    pub adversaries: Vec<AdversarySpec>,
    pub trials: usize,
    pub base_seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    /// JSON-lines destination for per-trial records.
    pub out: Option<PathBuf>,
    /// Transcript of the first trial, in the channel TSV format.
    pub transcript: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(protocol: ProtocolKind, params: ProtocolConfig, ballots: BallotSpec) -> Self {
        Self {
            protocol,
            params,
            ballots,
            adversaries: Vec::new(),
            trials: 1,
            base_seed: 0,
            workers: 0,
            out: None,
            transcript: None,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_adversary(mut self, spec: AdversarySpec) -> Self {
        self.adversaries.push(spec);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials < 1 {
            return Err(Error::config("trials must be at least 1"));
        }
        if let BallotSpec::Fixed(c) = &self.ballots {
            if c.len() != self.params.voters {
                return Err(Error::config(format!(
                    "{} ballots given for {} voters",
                    c.len(),
                    self.params.voters
                )));
            }
            let m = self.params.effective_candidates();
            if let Some(bad) = c.iter().find(|&&x| !(1..=m).contains(&x)) {
                return Err(Error::config(format!("ballot {bad} outside 1..={m}")));
            }
        }
        for a in &self.adversaries {
            a.validate()?;
            let limit = match a.party.role {
                crate::channels::Role::Voter => self.params.voters,
                crate::channels::Role::Authority if self.protocol == ProtocolKind::Basic => 0,
                crate::channels::Role::Authority => self.params.authorities,
            };
            if !(1..=limit).contains(&a.party.index) {
                return Err(Error::config(format!("{} does not take part in this protocol", a.party)));
            }
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

/// One trial: the run record plus what the harness knows about the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Ballots handed to the voters (dishonest voters may ignore theirs).
    pub ballots: Vec<usize>,
    /// Not failed, every honest count is met and the counts add up.
    pub correct: bool,
    /// Not failed and equal to the tally of all counted ballots.
    pub exact: bool,
    #[serde(flatten)]
    pub run: RunRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub protocol: ProtocolKind,
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub failure_causes: BTreeMap<String, usize>,
    /// Trials in which each party's ballot was revoked.
    pub revocations: BTreeMap<PartyId, usize>,
    /// Trials with at least one revocation.
    pub revoked_trials: usize,
    pub correct: usize,
    pub correct_rate: f64,
    pub exact: usize,
    /// Trials that did not fail yet did not reproduce the counted ballots.
    pub wrong_unfailed: usize,
    /// `|σ[k] − p_{y[k]}|` against the counted ballots, mean and max per
    /// candidate row.
    pub sigma_dev_mean: Vec<f64>,
    pub sigma_dev_max: Vec<f64>,
    pub accounting_pass: bool,
}

impl ExperimentSummary {
    /// Standard error of the failure rate.
    pub fn failure_rate_se(&self) -> f64 {
        let p = self.failure_rate;
        (p * (1.0 - p) / self.trials.max(1) as f64).sqrt()
    }

    pub fn revocation_rate(&self, party: PartyId) -> f64 {
        self.revocations.get(&party).copied().unwrap_or(0) as f64 / self.trials.max(1) as f64
    }

    /// Recomputes the summary from per-trial records.
    pub fn from_records(protocol: ProtocolKind, records: &[TrialRecord]) -> Self {
        let trials = records.len();
        let mut failure_causes = BTreeMap::new();
        let mut revocations = BTreeMap::new();
        let (mut failures, mut correct, mut exact, mut wrong_unfailed, mut revoked_trials) = (0, 0, 0, 0, 0);
        let mut dev_sum: Vec<f64> = Vec::new();
        let mut dev_max: Vec<f64> = Vec::new();
        let mut dev_n = 0usize;
        let mut accounting_pass = true;
        for r in records {
            let failed = r.run.failure_cause.is_some();
            if let Some(c) = r.run.failure_cause {
                failures += 1;
                *failure_causes.entry(c.to_string()).or_insert(0) += 1;
            }
            correct += usize::from(r.correct);
            exact += usize::from(r.exact);
            wrong_unfailed += usize::from(!failed && !r.exact);
            if !r.run.revoked.is_empty() {
                revoked_trials += 1;
            }
            for p in &r.run.revoked {
                *revocations.entry(*p).or_insert(0) += 1;
            }
            if let Some(dev) = sigma_deviation(r) {
                if dev_sum.is_empty() {
                    dev_sum = vec![0.0; dev.len()];
                    dev_max = vec![0.0; dev.len()];
                }
                for (k, d) in dev.iter().enumerate() {
                    dev_sum[k] += d;
                    dev_max[k] = dev_max[k].max(*d);
                }
                dev_n += 1;
            }
            if !failed && !verify_accounting(&r.run).pass {
                accounting_pass = false;
            }
        }
        let rate = |x: usize| if trials == 0 { 0.0 } else { x as f64 / trials as f64 };
        Self {
            protocol,
            trials,
            failures,
            failure_rate: rate(failures),
            failure_causes,
            revocations,
            revoked_trials,
            correct,
            correct_rate: rate(correct),
            exact,
            wrong_unfailed,
            sigma_dev_mean: dev_sum.iter().map(|s| s / dev_n.max(1) as f64).collect(),
            sigma_dev_max: dev_max,
            accounting_pass,
        }
    }
}

fn counted_ballots(r: &TrialRecord) -> Vec<usize> {
    let m = r.run.config.effective_candidates();
    let mut y = vec![0; m];
    for (i, &c) in r.ballots.iter().enumerate() {
        if !r.run.revoked.contains(&PartyId::voter(i + 1)) {
            y[c - 1] += 1;
        }
    }
    y
}

fn sigma_deviation(r: &TrialRecord) -> Option<Vec<f64>> {
    if r.run.sigma.is_empty() {
        return None;
    }
    let table = DecoderTable::new(r.run.config.voters).ok()?;
    let y = counted_ballots(r);
    Some(
        r.run
            .sigma
            .iter()
            .zip(&y)
            .map(|(s, &v)| (s - table.probs()[v]).abs())
            .collect(),
    )
}

fn judge(ballots: &[usize], run: &RunRecord, honest: &[bool]) -> (bool, bool) {
    let Some(counts) = run.tally.counts() else {
        return (false, false);
    };
    let mut full = counts.to_vec();
    if let Some(d) = run.dummy {
        full.push(d);
    }
    let m = full.len();
    let mut all = vec![0; m];
    let mut honest_y = vec![0; m];
    for (i, &c) in ballots.iter().enumerate() {
        if run.revoked.contains(&PartyId::voter(i + 1)) {
            continue;
        }
        all[c - 1] += 1;
        if honest[i] {
            honest_y[c - 1] += 1;
        }
    }
    let counted: usize = all.iter().sum();
    let correct = full.iter().sum::<usize>() == counted && full.iter().zip(&honest_y).all(|(y, h)| y >= h);
    (correct, full == all)
}

/// Runs every trial (concurrently, up to `workers`) and returns the records
/// in trial order with their summary. Output files named in the config are
/// written as well.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(ExperimentSummary, Vec<TrialRecord>)> {
    let (records, first) = run_trials(cfg)?;
    if let Some(path) = &cfg.out {
        let file = std::fs::File::create(path).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        write_jsonl(&records, std::io::BufWriter::new(file)).map_err(|e| Error::config(e.to_string()))?;
    }
    if let (Some(path), Some(t)) = (&cfg.transcript, first) {
        let file = std::fs::File::create(path).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        t.write_tsv(std::io::BufWriter::new(file), true)
            .map_err(|e| Error::config(e.to_string()))?;
    }
    Ok((ExperimentSummary::from_records(cfg.protocol, &records), records))
}

fn run_trials(cfg: &ExperimentConfig) -> Result<(Vec<TrialRecord>, Option<Transcript>)> {
    cfg.validate()?;
    let honest: Vec<bool> = (1..=cfg.params.voters)
        .map(|i| {
            cfg.adversaries
                .iter()
                .all(|a| a.party != PartyId::voter(i) || a.strategy.is_honest())
        })
        .collect();
    let keep_transcript = cfg.transcript.is_some();
    let one = |t: usize| -> Result<(TrialRecord, Option<Transcript>)> {
        let seed = cfg.trial_seed(t);
        let ballots = cfg.ballots.draw(&cfg.params, seed);
        let out = run_protocol(cfg.protocol, &cfg.params, &ballots_from_choices(&ballots), &cfg.adversaries, seed)?;
        let run = out.to_record();
        let (correct, exact) = judge(&ballots, &run, &honest);
        let transcript = (keep_transcript && t == 0).then_some(out.transcript);
        Ok((
            TrialRecord {
                trial: t,
                ballots,
                correct,
                exact,
                run,
            },
            transcript,
        ))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::config(e.to_string()))?;
    let results: Vec<(TrialRecord, Option<Transcript>)> =
        pool.install(|| (0..cfg.trials).into_par_iter().map(one).collect::<Result<_>>())?;
    let mut first = None;
    let mut records = Vec::with_capacity(results.len());
    for (r, t) in results {
        if t.is_some() {
            first = t;
        }
        records.push(r);
    }
    Ok((records, first))
}

pub fn write_jsonl<W: Write>(records: &[TrialRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_jsonl<R: std::io::BufRead>(input: R) -> Result<Vec<TrialRecord>> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|(i, l)| {
            let l = l.map_err(|e| Error::config(e.to_string()))?;
            serde_json::from_str(&l).map_err(|e| Error::config(format!("record {}: {e}", i + 1)))
        })
        .collect()
}
