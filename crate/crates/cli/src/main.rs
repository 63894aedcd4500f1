use std::process::ExitCode;

use clap::Parser;

use darkstate_cli::{exit_code, run, Cli, EXIT_CHECK_FAILED};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
