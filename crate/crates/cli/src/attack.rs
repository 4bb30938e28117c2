use std::path::Path;

use anyhow::Result;
use rsms_core::sim::attacks::{replay_requests, substitute_membership_point, tamper_c2, tamper_fields, AttackReport};
use serde::Serialize;

use crate::output::RunDir;
use crate::simulate::verdict;
use crate::{config_error, Status};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Replays of each recorded request.
    #[arg(long, default_value_t = 1000)]
    replay_trials: u64,
    /// Random c2 substitutions.
    #[arg(long, default_value_t = 10_000)]
    tamper_trials: u64,
    /// Membership point substitutions per group size.
    #[arg(long, default_value_t = 1000)]
    substitution_trials: u64,
    /// Largest group size in the substitution suite.
    #[arg(long, default_value_t = 8)]
    max_n: usize,
}

#[derive(Serialize)]
struct Row<'a> {
    name: &'a str,
    trials: u64,
    rejected: u64,
    rate: f64,
    threshold: f64,
    passed: bool,
}

pub fn run(args: &Args, out: &Path) -> Result<Status> {
    if args.max_n == 0 {
        return Err(config_error("--max-n must be at least 1"));
    }
    let mut reports: Vec<AttackReport> = replay_requests(args.seed, args.replay_trials);
    reports.push(tamper_c2(args.seed, args.tamper_trials));
    for n in 1..=args.max_n {
        reports.push(substitute_membership_point(args.seed + n as u64, n, args.substitution_trials));
    }
    reports.extend(tamper_fields(args.seed));

    println!("{:<40} {:>8} {:>9} {:>9} {:>10}  verdict", "attack", "trials", "rejected", "rate", "threshold");
    let rows: Vec<Row> = reports
        .iter()
        .map(|r| Row {
            name: &r.name,
            trials: r.trials,
            rejected: r.rejected,
            rate: r.rate(),
            threshold: r.threshold,
            passed: r.passed(),
        })
        .collect();
    for r in &rows {
        println!(
            "{:<40} {:>8} {:>9} {:>9.5} {:>10.5}  {}",
            r.name,
            r.trials,
            r.rejected,
            r.rate,
            r.threshold,
            verdict(r.passed)
        );
    }
    let status = if rows.iter().all(|r| r.passed) { Status::Ok } else { Status::ThresholdMiss };

    let mut dir = RunDir::create(out, "attack", args.seed)?;
    dir.write_csv("attacks.csv", &rows)?;
    let config = serde_json::json!({
        "seed": args.seed,
        "replay_trials": args.replay_trials,
        "tamper_trials": args.tamper_trials,
        "substitution_trials": args.substitution_trials,
        "max_n": args.max_n,
    });
    let path = dir.finish(config, status.code())?;
    eprintln!("wrote {}", path.display());
    Ok(status)
}
