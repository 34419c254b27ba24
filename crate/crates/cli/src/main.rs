mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::commands::{CliError, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(err) => {
            eprintln!("sepkit: {err}");
            ExitCode::from(match err {
                CliError::Usage(_) => 2,
                CliError::Core(sepkit_core::Error::Undecided { .. }) => 3,
                CliError::Core(_) => 2,
            })
        }
    }
}
