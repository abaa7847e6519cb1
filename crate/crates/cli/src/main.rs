//! `xlce` command-line front-end.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod commands;
mod snr;

use commands::{Cli, CliError};

/// Exit statuses, one per failure class.
const EXIT_RUNTIME: u8 = 1;
const EXIT_UNKNOWN_FLAG: u8 = 2;
const EXIT_MISSING_FLAG: u8 = 3;
const EXIT_USAGE: u8 = 4;
const EXIT_IO: u8 = 5;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    return ExitCode::SUCCESS;
                }
                ErrorKind::UnknownArgument | ErrorKind::InvalidSubcommand => EXIT_UNKNOWN_FLAG,
                ErrorKind::MissingRequiredArgument | ErrorKind::MissingSubcommand => EXIT_MISSING_FLAG,
                _ => EXIT_USAGE,
            };
            eprintln!("error: {}", first_line(&e.to_string()));
            return ExitCode::from(code);
        }
    };

    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", first_line(&err.to_string()));
            ExitCode::from(match err {
                CliError::Io(_) => EXIT_IO,
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Core(_) => EXIT_RUNTIME,
            })
        }
    }
}

fn first_line(msg: &str) -> &str {
    msg.trim_start_matches("error: ").lines().next().unwrap_or("").trim()
}
