//! `rsms`: demos, throughput simulations, cost tables and adversarial suites.
//!
//! Exit codes: 0 all verdicts accept and all thresholds met, 2 protocol
//! reject, 3 threshold miss, 4 configuration error, 1 anything else.

mod attack;
mod costs;
mod demo;
mod output;
mod scenario;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "rsms", version, about = "Resource-pool authentication and group key management toolkit")]
struct Cli {
    /// Base directory for run outputs.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the end-to-end protocol demo and print the annotated transcript.
    Demo(demo::Args),
    /// Run a scenario script (TOML).
    Scenario(scenario::Args),
    /// Monte Carlo throughput study, optionally swept over one parameter.
    Simulate(simulate::Args),
    /// Operation counts, message sizes and primitive timings.
    Costs(costs::Args),
    /// Replay, tamper and substitution suites with rejection rates.
    Attack(attack::Args),
}

/// Outcome of a completed run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Reject,
    ThresholdMiss,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Reject => 2,
            Status::ThresholdMiss => 3,
        }
    }
}

/// Invalid flags, config files or scenario scripts.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

pub fn config_error(msg: impl std::fmt::Display) -> anyhow::Error {
    ConfigError(msg.to_string()).into()
}

const CONFIG_EXIT: u8 = 4;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { CONFIG_EXIT } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Demo(a) => demo::run(a, &cli.out),
        Command::Scenario(a) => scenario::run(a, &cli.out),
        Command::Simulate(a) => simulate::run(a, &cli.out),
        Command::Costs(a) => costs::run(a, &cli.out),
        Command::Attack(a) => attack::run(a, &cli.out),
    };
    match result {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<ConfigError>() { CONFIG_EXIT } else { 1 })
        }
    }
}
