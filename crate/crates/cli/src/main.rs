mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;
use hyperwalk::io::IoError;
use hyperwalk::Error;

use crate::commands::DisconnectedInput;
use crate::config::{Cli, Command, RunConfig};

/// 1: I/O or configuration, 2: solver or simulation gave no answer,
/// 3: disconnected input.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<DisconnectedInput>() {
            return 3;
        }
        let model = cause.downcast_ref::<Error>().or_else(|| match cause.downcast_ref::<IoError>() {
            Some(IoError::Invalid(e)) | Some(IoError::Model { source: e, .. }) => Some(e),
            _ => None,
        });
        match model {
            Some(Error::NotConverged(_) | Error::AllCensored { .. }) => return 2,
            Some(Error::Disconnected { .. } | Error::IsolatedNode(_)) => return 3,
            _ => {}
        }
    }
    1
}

fn run(command: Command) -> anyhow::Result<()> {
    let cfg = RunConfig::resolve(&command)?;
    match command {
        Command::Distances(_) => commands::distances(cfg),
        Command::Neighbors(_) => commands::neighbors(cfg),
        Command::Simulate(_) => commands::simulate(cfg),
        Command::Stats(_) => commands::stats(cfg),
        Command::Paths(_) => commands::paths(cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
