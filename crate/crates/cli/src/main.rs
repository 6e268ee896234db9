//! `livebib`: curate a living bibliography from the command line.
//!
//! Exit status is 0 on success, 1 for user errors (bad arguments, invalid
//! queries or decisions, unknown libraries) and 2 for environment or I/O
//! failures.

mod args;
mod commands;
mod config;
mod error;
mod workspace;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use config::Settings;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.global.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .format_target(false)
        .init();
    let result = Settings::resolve(&cli.global).and_then(|settings| {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        let r = commands::run(cli.command, &settings, &mut out);
        let _ = out.flush();
        r
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
