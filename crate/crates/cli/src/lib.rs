//! Command-line front end: one subcommand per invocation, one JSON document
//! on stdout (or `--output`), diagnostics on stderr.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod io;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde_json::Value;

pub use args::{Cli, Command};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONDITION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Schema version written into every document.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
}

impl From<starlike_core::Error> for CliError {
    fn from(e: starlike_core::Error) -> Self {
        use starlike_core::Error as E;
        match e {
            E::InvalidParameter { .. }
            | E::ComplexRoots { .. }
            | E::NegativeRoot { .. }
            | E::NonUnitConstantTerm { .. }
            | E::NonZeroConstantTerm { .. }
            | E::ParamOutOfRange(_)
            | E::PreconditionViolated(_)
            | E::UnknownOperator(_)
            | E::NotCovered(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

/// A finished document plus the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub document: Value,
    pub exit_code: i32,
}

/// Parse `argv`, run the subcommand and write the JSON document.
/// Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let mut text = serde_json::to_string_pretty(&outcome.document)
                .expect("JSON values always serialize");
            text.push('\n');
            let written = match &cli.output {
                Some(path) => std::fs::write(path, text),
                None => stdout.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return EXIT_NUMERIC;
            }
            if outcome.exit_code != EXIT_OK {
                let _ = writeln!(stderr, "not certified (exit {})", outcome.exit_code);
            }
            outcome.exit_code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Run a parsed command without writing anything.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Beta(a) => commands::beta(a),
        Command::Check(a) => commands::check(a),
        Command::Transform(a) => commands::transform(a),
        Command::Verify(a) => commands::verify(a),
        Command::Report(a) => commands::report(a),
    }
}
