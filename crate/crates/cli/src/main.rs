use std::process::ExitCode;

use clap::Parser;
use normner_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            if !summary.is_empty() {
                eprintln!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
