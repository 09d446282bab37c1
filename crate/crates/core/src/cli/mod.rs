//! Command-line front end: field selectors, run configuration, `verify`
//! check registry and CSV artifacts.

mod checks;
mod commands;
mod config;
mod fieldspec;
mod output;

pub use checks::{Check, CheckInput, CheckOutcome, CheckRegistry};
pub use commands::{refinement_table, Cli, Command};
pub use config::{RunConfig, SolveMode};
pub use fieldspec::FieldSpec;
pub use output::{
    exit_code, CsvArtifact, EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_PARSE, EXIT_SOLVER,
    EXIT_VERIFY_FAILED, OUT_DIR_ENV,
};

use clap::Parser;
use std::ffi::OsString;
use std::io::Write;

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code. Reports go to `out`, errors to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Landau(c) => commands::landau(c, out),
        Command::Verify(a) => commands::verify(a, out),
        Command::Solve(a) => commands::solve(a, out),
        Command::Asymptotics(a) => commands::asymptotics(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
