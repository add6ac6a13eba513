//! `wardlens`: batch analytics over ICU posture-detection streams.
//!
//! Four subcommands cover the pipeline: `validate` checks cohort files,
//! `analyze` builds aligned windows and association reports, `deteval`
//! scores detections against ground truth over patient-grouped folds, and
//! `synth` generates seeded synthetic cohorts with planted effects.
//! Exit codes: 0 success, 1 domain failure, 2 I/O or usage failure.

mod analyze;
mod args;
mod deteval;
mod fail;
mod load;
mod synth;
mod validate;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use fail::CliError;

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(threads) = threads else {
        return Ok(()); // rayon defaults to all cores
    };
    if threads == 0 {
        return Err(fail::usage("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|err| fail::usage(format!("cannot configure thread pool: {err}")))
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    // Sequential build: the flag is accepted for interface stability but
    // everything runs on one thread regardless.
    if threads == Some(0) {
        return Err(fail::usage("--threads must be at least 1"));
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    match &cli.command {
        Command::Validate(args) => validate::run(args),
        Command::Analyze(args) => analyze::run(args),
        Command::Deteval(args) => deteval::run(args),
        Command::Synth(args) => synth::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
