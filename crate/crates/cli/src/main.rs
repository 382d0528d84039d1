mod args;
mod commands;
mod error;
mod svg;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{CliError, EXIT_VALIDATION};

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("RLSPEC_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Validation(format!("RLSPEC_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot configure thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Info(a) => commands::info(a, cli.seed),
        Command::Charpoly(a) => commands::charpoly(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Numfun(a) => commands::numfun(a),
        Command::Friedrichs(a) => commands::friedrichs(a),
        Command::Phi(a) => commands::phi(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            if std::env::args().any(|a| a == "--error-json") {
                let rendered = e.render().to_string();
                let first = rendered.lines().next().unwrap_or_default();
                let err = CliError::Validation(first.trim_start_matches("error: ").to_string());
                eprintln!("{}", err.to_json());
            } else {
                let _ = e.print();
            }
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.error_json {
                eprintln!("{}", e.to_json());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
