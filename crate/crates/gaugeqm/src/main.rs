use std::process::ExitCode;

use clap::Parser;
use gaugeqm::cli::{main_with, Cli};

fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => main_with(cli),
        // Usage errors share the validation exit code; clap's own code 2
        // would read as a numerical failure.
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
