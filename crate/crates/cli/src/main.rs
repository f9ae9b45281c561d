//! `gl2lab`: command-line driver for the verification campaigns and table generators.

mod args;
mod campaigns;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match campaigns::run(&cli.command, cli.seed) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("gl2lab: {e}");
            return ExitCode::from(2);
        }
    };
    let elapsed = cli.timing.then(|| start.elapsed());
    if let Err(e) = output::emit(&cli, &outcome, elapsed) {
        eprintln!("gl2lab: {e}");
        return ExitCode::from(2);
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
