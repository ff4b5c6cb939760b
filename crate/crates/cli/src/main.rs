use std::fs;
use std::process::ExitCode;

use clap::Parser;
use wonder_cli::{render, run, Cli, Failure};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let text = render(&cli, &outcome);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(if outcome.ok { 0 } else { 1 })
        }
        Err(f) => {
            let (kind, e) = match &f {
                Failure::Input(e) => ("input error", e),
                Failure::Verification(e) => ("verification error", e),
            };
            eprintln!("{kind}: {e:#}");
            ExitCode::from(f.exit_code())
        }
    }
}
