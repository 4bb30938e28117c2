use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rsms_core::sim::{run_protocol_scenario, Outcome, Scenario};

use crate::output::RunDir;
use crate::{config_error, Status};

#[derive(clap::Args)]
pub struct Args {
    /// Scenario script (TOML with `[world]` and `[[steps]]`).
    file: PathBuf,
    /// Overrides the script's world seed.
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run(args: &Args, out: &Path) -> Result<Status> {
    let text = std::fs::read_to_string(&args.file).with_context(|| format!("reading {}", args.file.display()))?;
    let mut scenario = Scenario::from_toml(&text).map_err(config_error)?;
    if let Some(seed) = args.seed {
        scenario.world.seed = seed;
    }
    execute("scenario", &scenario, out)
}

/// Runs `scenario`, prints the transcript and writes it under `out`.
pub fn execute(subcommand: &str, scenario: &Scenario, out: &Path) -> Result<Status> {
    let run = run_protocol_scenario(scenario).map_err(config_error)?;
    let t = &run.transcript;
    let text = t.render();
    print!("{text}");
    println!("{} messages, {} verdicts, {} rejects", t.messages(), t.verdicts().count(), t.rejects());
    for (label, subject, outcome) in t.verdicts() {
        if let Outcome::Reject(reason) = outcome {
            println!("REJECT {label} {subject}: {reason}");
        }
    }
    let status = if run.all_accepted { Status::Ok } else { Status::Reject };

    let mut dir = RunDir::create(out, subcommand, scenario.world.seed)?;
    dir.write("transcript.txt", &text)?;
    dir.write_json("transcript.json", t)?;
    dir.write("scenario.toml", scenario.to_toml())?;
    let path = dir.finish(serde_json::to_value(scenario)?, status.code())?;
    eprintln!("wrote {}", path.display());
    Ok(status)
}
