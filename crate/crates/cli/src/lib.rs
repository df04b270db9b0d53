//! Command-line front end: parses arguments, runs one experiment and emits a
//! CSV or JSON table carrying a reproducibility manifest.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on runtime errors.

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

pub mod args;
pub mod commands;
pub mod table;

use args::{Cli, Command};
use table::{render, RunManifest};

/// Environment variable supplying a default seed for sampled runs.
pub const SEED_ENV: &str = "BIPHOTON_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl From<biphoton::Error> for CliError {
    fn from(e: biphoton::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

/// Runs the CLI with the process environment's seed override.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    dispatch_with_env(argv, env_seed.as_deref(), out, err)
}

/// As [`dispatch`], with the seed override passed in explicitly.
pub fn dispatch_with_env<I, T>(
    argv: I,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match run(&cli, env_seed, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, CliError::Usage(_)) {
                let _ = writeln!(err, "\nFor more information, try '--help'.");
            }
            e.exit_code()
        }
    }
}

fn run(cli: &Cli, env_seed: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
    let (outcome, output) = match &cli.command {
        Command::Mzi(a) => (commands::mzi(a)?, &a.output),
        Command::Rto(a) => (commands::rto(a, env_seed)?, &a.output),
        Command::Sweep(a) => (commands::sweep(a, env_seed)?, &a.output),
        Command::Table1(a) => (commands::table1(a)?, &a.output),
        Command::Chsh(a) => (commands::chsh(a, env_seed)?, &a.output),
        Command::Whichpath(a) => (commands::whichpath(a)?, &a.output),
        Command::Ledger(a) => (commands::ledger(a)?, &a.output),
    };
    let manifest = RunManifest::new(outcome.command, outcome.parameters, &outcome.table);
    let text = render(&manifest, &outcome.table, output.format);
    match &output.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Runtime(format!("cannot write output: {e}"))),
    }
}
