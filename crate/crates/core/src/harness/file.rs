//! Experiment configuration files.
//!
//! ```toml
//! [protocol]
//! kind = "authority"
//! voters = 4
//! candidates = 2
//! authorities = 3
//! security = 500
//! transport = "memory"
//!
//! [experiment]
//! trials = 100
//! seed = 1
//! ballots = "1,1,2,1"
//! adversaries = ["party=authority:2 strategy=parity-flipper"]
//!
//! [output]
//! out = "runs.jsonl"
//! ```
//!
//! Every key is optional; values given on the command line take precedence.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{BallotSpec, ExperimentConfig};
use crate::config::{ProtocolConfig, TransportKind};
use crate::error::{Error, Result};
use crate::protocols::ProtocolKind;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub kind: Option<ProtocolKind>,
    pub voters: Option<usize>,
    pub candidates: Option<usize>,
    pub authorities: Option<usize>,
    pub security: Option<usize>,
    pub dummy_candidate: Option<bool>,
    pub transport: Option<TransportKind>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub ballots: Option<String>,
    #[serde(default)]
    pub adversaries: Vec<String>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub out: Option<PathBuf>,
    pub transcript: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fills unset keys with defaults: the basic protocol, 3 voters, 2
    /// candidates, 1 authority, `s = 1`, one trial, seed 0 and uniformly
    /// drawn ballots.
    pub fn into_experiment(self) -> Result<ExperimentConfig> {
        let p = self.protocol;
        let mut params = ProtocolConfig::new(
            p.voters.unwrap_or(3),
            p.candidates.unwrap_or(2),
            p.authorities.unwrap_or(1),
            p.security.unwrap_or(1),
        );
        params.dummy_candidate = p.dummy_candidate.unwrap_or(false);
        params.transport = p.transport.unwrap_or_default();

        let e = self.experiment;
        let ballots = match e.ballots {
            Some(b) => b.parse()?,
            None => BallotSpec::Uniform,
        };
        let adversaries = e.adversaries.iter().map(|a| a.parse()).collect::<Result<Vec<_>>>()?;
        let cfg = ExperimentConfig {
            protocol: p.kind.unwrap_or(ProtocolKind::Basic),
            params,
            ballots,
            adversaries,
            trials: e.trials.unwrap_or(1),
            base_seed: e.seed.unwrap_or(0),
            workers: e.workers.unwrap_or(0),
            out: self.output.out,
            transcript: self.output.transcript,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_example() {
        let text = r#"
[protocol]
kind = "authority"
voters = 4
candidates = 2
authorities = 3
security = 500
transport = "commit-reveal"

[experiment]
trials = 100
seed = 1
ballots = "1,1,2,1"
adversaries = ["party=authority:2 strategy=parity-flipper"]

[output]
out = "runs.jsonl"
"#;
        let cfg = FileConfig::parse(text).unwrap().into_experiment().unwrap();
        assert_eq!(cfg.protocol, ProtocolKind::Authority);
        assert_eq!(cfg.params.security, 500);
        assert_eq!(cfg.params.transport, TransportKind::CommitReveal);
        assert_eq!(cfg.ballots, BallotSpec::Fixed(vec![1, 1, 2, 1]));
        assert_eq!(cfg.adversaries.len(), 1);
        assert_eq!(cfg.out.as_deref(), Some(Path::new("runs.jsonl")));
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = FileConfig::parse("").unwrap().into_experiment().unwrap();
        assert_eq!(cfg.params.voters, 3);
        assert_eq!(cfg.trials, 1);
        assert_eq!(cfg.ballots, BallotSpec::Uniform);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_errors() {
        assert!(FileConfig::parse("[protocol]\nvoterz = 3\n").is_err());
        assert!(FileConfig::parse("[protocol]\nkind = \"fancy\"\n").is_err());
        let bad = FileConfig::parse("[protocol]\nvoters = 2\n").unwrap();
        assert!(matches!(bad.into_experiment(), Err(Error::InvalidParameter(_))));
        let bad = FileConfig::parse("[experiment]\nballots = \"1,2\"\n").unwrap();
        assert!(matches!(bad.into_experiment(), Err(Error::Configuration(_))));
    }
}
