//! Command implementations behind the `treebench` binary.

pub mod args;
pub mod bench;
pub mod commands;
pub mod fit;
pub mod input;
pub mod model;
pub mod report;
pub mod sweep;

use anyhow::Result;

use args::Command;

/// Process exit status of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    PartialFailure,
}

pub fn run(command: &Command) -> Result<Status> {
    match command {
        Command::Binarize(a) => commands::run_binarize(a)?,
        Command::Fit(a) => {
            fit::run_fit(a, false)?;
        }
        Command::Tune(a) => {
            fit::run_fit(a, true)?;
        }
        Command::Synth(a) => commands::run_synth(a)?,
        Command::Bench(a) => {
            let s = bench::run_benchmark(a)?;
            println!("{} rows, {} failed", s.rows, s.failures);
            if s.failures > 0 {
                return Ok(Status::PartialFailure);
            }
        }
        Command::Swa(a) => {
            sweep::run_swa_sweep(a)?;
        }
        Command::Rank(a) => {
            commands::run_rank(a)?;
        }
    }
    Ok(Status::Success)
}
