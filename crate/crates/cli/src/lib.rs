//! Experiment runner for realism-based nonlocality: noise sweeps, monogamy
//! scans and single-setting evaluation, written as CSV or JSON.

pub mod args;
pub mod commands;
pub mod error;
pub mod experiment;
pub mod monogamy;
pub mod output;
pub mod spec;
pub mod sweep;

use clap::error::ErrorKind;
use clap::Parser;
use std::ffi::OsString;
use std::io::Write;

pub use error::{CliError, CliResult};

/// Parses `argv`, runs the command and returns the process exit status.
pub fn run_main<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match commands::run(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
