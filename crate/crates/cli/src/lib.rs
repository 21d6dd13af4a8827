//! Command-line front end: configuration, the experiment commands and the
//! certificate suite they share with the acceptance run.

pub mod commands;
pub mod config;
pub mod report;
pub mod suite;

use std::time::Instant;

use anyhow::Result;
use clap::Parser;

use config::{Cli, UsageError};
use report::{write_manifest, Writer};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn is_usage(err: &anyhow::Error) -> bool {
    err.downcast_ref::<UsageError>().is_some()
        || matches!(err.downcast_ref::<expanderlab::Error>(), Some(expanderlab::Error::Precondition(_)))
}

fn execute(cli: Cli) -> Result<bool> {
    if let Some(threads) = config::thread_cap()? {
        expanderlab::par::set_threads(threads);
    }
    let config = config::resolve(cli)?;
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| UsageError(format!("cannot create {}: {e}", config.output_dir.display())))?;
    let start = Instant::now();
    let writer = Writer { dir: &config.output_dir, formats: &config.formats };
    let outcome = commands::run(&config, &writer)?;
    let manifest = write_manifest(&config, &outcome, start.elapsed())?;
    for c in outcome.checks.iter().filter(|c| !c.passed) {
        eprintln!("failed: {} = {:.6e} (tolerance {:.6e}) {}", c.name, c.value, c.tolerance, c.detail);
    }
    println!("{}", manifest.display());
    Ok(outcome.passed())
}

/// Parse arguments, run the command and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(e) if is_usage(&e) => {
            eprintln!("usage error: {e:#}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILURE
        }
    }
}
