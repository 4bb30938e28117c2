use std::path::Path;

use anyhow::Result;
use rsms_core::sim::{Field, Scenario};

use crate::{config_error, scenario, Status};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// RNs registered per pool (raised to fit the group and one replacement).
    #[arg(long, default_value_t = 5)]
    pool_size: u32,
    /// RNs allocated to the user's group.
    #[arg(long, default_value_t = 3)]
    group_size: usize,
    /// Corrupt the first message carrying this field, e.g. `msg1.c2`.
    #[arg(long)]
    tamper: Option<String>,
}

pub fn run(args: &Args, out: &Path) -> Result<Status> {
    if args.group_size == 0 {
        return Err(config_error("--group-size must be at least 1"));
    }
    let mut s = Scenario::demo(args.seed, args.pool_size, args.group_size);
    if let Some(name) = &args.tamper {
        let field = Field::parse(name).ok_or_else(|| {
            let known: Vec<&str> = Field::ALL.iter().map(|f| f.name()).collect();
            config_error(format!("unknown field {name:?}; expected one of {}", known.join(", ")))
        })?;
        s = s.with_tamper(field);
    }
    scenario::execute("demo", &s, out)
}
