//! Failure rate of Protocol 1 as the security parameter grows, with a
//! standard error per point. Trials run in parallel and the output does not
//! depend on the number of workers.
//!
//!     cargo run --release --example monte_carlo_sweep

use vote_sim::harness::{sweep, write_sweep_csv, BallotSpec, ExperimentConfig, SweepParameter};
use vote_sim::protocols::ProtocolKind;
use vote_sim::ProtocolConfig;

fn main() -> anyhow::Result<()> {
    let base = ExperimentConfig::new(ProtocolKind::Basic, ProtocolConfig::new(4, 2, 1, 1), BallotSpec::Uniform)
        .with_trials(200)
        .with_seed(2024);
    let rows = sweep(SweepParameter::S, &[1, 10, 50, 100, 250, 500], &base)?;
    for row in &rows {
        println!(
            "s = {:>4}: failure rate {:.3} +- {:.3}",
            row.value,
            row.summary.failure_rate,
            row.summary.failure_rate_se()
        );
    }
    write_sweep_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
