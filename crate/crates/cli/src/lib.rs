//! Command-line front end: `spectrum`, `evolve`, `sweep` and `verify`.

pub mod angle;
pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command};
use commands::Globals;
use error::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    let globals = Globals {
        out: cli.out,
        format: cli.format,
        quiet: cli.quiet,
    };
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum::run(a, &globals),
        Command::Evolve(a) => commands::evolve::run(a, &globals),
        Command::Sweep(a) => commands::sweep::run(a, &globals),
        Command::Verify(a) => commands::verify::run(a, &globals),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { error::EXIT_USAGE } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
