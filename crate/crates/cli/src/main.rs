use std::process::ExitCode;

use beamtrace_cli::{execute, Cli};
use clap::Parser;

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("beamtrace: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
