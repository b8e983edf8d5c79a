use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use vote_sim::harness::{
    read_jsonl, run_experiment, sweep, verify_accounting, write_sweep_csv, ExperimentConfig, FileConfig,
    SweepParameter,
};
use vote_sim::protocols::ProtocolKind;
use vote_sim::TransportKind;

#[derive(Parser)]
#[command(name = "vote-sim", version, about = "Simulate private voting protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated trials and print a JSON summary.
    Run(Experiment),
    /// Repeat an experiment over a list of parameter values; writes CSV.
    Sweep {
        #[command(flatten)]
        experiment: Experiment,
        /// One of s, n, m, r, trials.
        #[arg(long)]
        param: String,
        /// Comma separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
    },
    /// Check the message accounting of every record in a JSON-lines file.
    Verify {
        input: PathBuf,
    },
}

#[derive(Args)]
struct Experiment {
    /// TOML file; flags given here override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    protocol: Option<ProtocolKind>,
    #[arg(long)]
    voters: Option<usize>,
    #[arg(long)]
    candidates: Option<usize>,
    #[arg(long)]
    authorities: Option<usize>,
    #[arg(long)]
    security: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma separated candidate indices, or `dist:uniform`.
    #[arg(long)]
    ballots: Option<String>,
    /// `party=<role>:<index> strategy=<name> [key=value ...]`; repeatable.
    #[arg(long = "adversary")]
    adversaries: Vec<String>,
    #[arg(long)]
    transport: Option<TransportKind>,
    #[arg(long)]
    dummy_candidate: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
}

impl Experiment {
    fn resolve(self) -> anyhow::Result<ExperimentConfig> {
        let mut file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let p = &mut file.protocol;
        p.kind = self.protocol.or(p.kind);
        p.voters = self.voters.or(p.voters);
        p.candidates = self.candidates.or(p.candidates);
        p.authorities = self.authorities.or(p.authorities);
        p.security = self.security.or(p.security);
        p.transport = self.transport.or(p.transport);
        if self.dummy_candidate {
            p.dummy_candidate = Some(true);
        }
        let e = &mut file.experiment;
        e.trials = self.trials.or(e.trials);
        e.seed = self.seed.or(e.seed);
        e.ballots = self.ballots.or(e.ballots.take());
        e.workers = self.workers.or(e.workers);
        e.adversaries.extend(self.adversaries);
        let o = &mut file.output;
        o.out = self.out.or(o.out.take());
        o.transcript = self.transcript.or(o.transcript.take());
        Ok(file.into_experiment()?)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run(exp) => {
            let cfg = exp.resolve()?;
            let (summary, _) = run_experiment(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Sweep {
            experiment,
            param,
            values,
        } => {
            let param: SweepParameter = param.parse()?;
            let mut base = experiment.resolve()?;
            let out = base.out.take();
            base.transcript = None;
            let rows = sweep(param, &values, &base)?;
            match out {
                Some(path) => {
                    let file = File::create(&path).with_context(|| path.display().to_string())?;
                    write_sweep_csv(&rows, BufWriter::new(file))?;
                }
                None => write_sweep_csv(&rows, io::stdout().lock())?,
            }
        }
        Command::Verify { input } => {
            let file = File::open(&input).with_context(|| input.display().to_string())?;
            let records = read_jsonl(BufReader::new(file))?;
            if records.is_empty() {
                bail!("{} holds no records", input.display());
            }
            let mut stdout = io::stdout().lock();
            let mut failed = 0;
            for rec in &records {
                let check = verify_accounting(&rec.run);
                writeln!(stdout, "trial {} {}", rec.trial, if check.pass { "pass" } else { "FAIL" })?;
                for row in check.failures() {
                    writeln!(stdout, "  {}: expected {}, got {}", row.what, row.expected, row.actual)?;
                }
                failed += usize::from(!check.pass);
            }
            writeln!(stdout, "{} of {} records pass", records.len() - failed, records.len())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
