use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ktrunc::cli::{execute, exit_code, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            if std::io::stdout().write_all(outcome.stdout.as_bytes()).is_err() {
                return ExitCode::from(4);
            }
            ExitCode::from(if outcome.property_failed { 3 } else { 0 })
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
