#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod doc;
mod error;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{caret, CliError};

fn main() -> ExitCode {
    let json = std::env::args().any(|a| a == "--json");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            if json {
                eprintln!(
                    "{}",
                    CliError::Usage(e.kind().to_string() + ": " + e.to_string().trim()).to_json()
                );
            } else {
                let _ = e.print();
            }
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Solve(c) => commands::solve(c),
        Command::Verify(v) => commands::verify(v),
        Command::Sample(c) => commands::sample(c),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            if json {
                eprintln!("{}", e.to_json());
            } else {
                eprintln!("error: {e}");
                if let CliError::Parse { source, error } = &e {
                    eprintln!("{}", caret(source, error.offset));
                }
            }
            e.exit_code()
        }
    }
}
