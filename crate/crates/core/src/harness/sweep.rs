use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{run_experiment, ExperimentConfig, ExperimentSummary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    S,
    N,
    M,
    R,
    Trials,
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s" | "security" => Ok(SweepParameter::S),
            "n" | "voters" => Ok(SweepParameter::N),
            "m" | "candidates" => Ok(SweepParameter::M),
            "r" | "authorities" => Ok(SweepParameter::R),
            "trials" => Ok(SweepParameter::Trials),
            other => Err(Error::config(format!(
                "cannot sweep `{other}`; choose one of s, n, m, r, trials"
            ))),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParameter::S => "s",
            SweepParameter::N => "n",
            SweepParameter::M => "m",
            SweepParameter::R => "r",
            SweepParameter::Trials => "trials",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: usize,
    pub summary: ExperimentSummary,
}

/// Runs `base` once per value of `parameter`. Output paths of `base` are
/// ignored.
pub fn sweep(parameter: SweepParameter, values: &[usize], base: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::config("sweep needs at least one value"));
    }
    values
        .iter()
        .map(|&value| {
            let mut cfg = base.clone();
            cfg.out = None;
            cfg.transcript = None;
            match parameter {
                SweepParameter::S => cfg.params.security = value,
                SweepParameter::N => cfg.params.voters = value,
                SweepParameter::M => cfg.params.candidates = value,
                SweepParameter::R => cfg.params.authorities = value,
                SweepParameter::Trials => cfg.trials = value,
            }
            let (summary, _) = run_experiment(&cfg)?;
            Ok(SweepRow {
                parameter,
                value,
                summary,
            })
        })
        .collect()
}

/// Columns: `parameter,value,trials,failures,failure_rate,failure_rate_se,
/// correct_rate,exact,revoked_trials,revoked_rate,accounting_pass`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "parameter",
        "value",
        "trials",
        "failures",
        "failure_rate",
        "failure_rate_se",
        "correct_rate",
        "exact",
        "revoked_trials",
        "revoked_rate",
        "accounting_pass",
    ])?;
    for r in rows {
        let s = &r.summary;
        w.write_record([
            r.parameter.to_string(),
            r.value.to_string(),
            s.trials.to_string(),
            s.failures.to_string(),
            s.failure_rate.to_string(),
            s.failure_rate_se().to_string(),
            s.correct_rate.to_string(),
            s.exact.to_string(),
            s.revoked_trials.to_string(),
            (s.revoked_trials as f64 / s.trials.max(1) as f64).to_string(),
            s.accounting_pass.to_string(),
        ])?;
    }
    w.flush()
}
