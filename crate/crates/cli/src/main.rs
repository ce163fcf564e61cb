//! `pgspectra`: analyse, compare, benchmark, generate and explore pose-graphs.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 audit failure.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

pub enum Failure {
    Usage(String),
    Data(String),
    Audit(Vec<String>),
}

fn init_logging(level: Option<log::LevelFilter>) {
    let mut builder = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"));
    if let Some(level) = level {
        builder.filter_level(level);
    }
    builder.format_timestamp(None).init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    init_logging(cli.log_level);
    let result = match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Compare(a) => commands::compare(a),
        Command::Bench(a) => commands::bench(a),
        Command::Gen(a) => commands::gen(a),
        Command::Explore(a) => commands::explore(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Audit(failures)) => {
            for f in &failures {
                eprintln!("audit failed: {f}");
            }
            ExitCode::from(3)
        }
    }
}
