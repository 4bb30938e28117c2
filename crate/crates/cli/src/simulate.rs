use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rsms_core::sim::throughput::{rows, SweepParam};
use rsms_core::sim::{run_sweep, run_throughput_sim, Arm, SimConfig, SimResult, Sweep};
use serde::Serialize;

use crate::output::RunDir;
use crate::{config_error, Status};

#[derive(clap::Args)]
pub struct Args {
    /// TOML file with SimConfig fields; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<u32>,
    /// `param:lo:hi:step`, param one of lambda_join, lambda_leave,
    /// lambda_arrive, service_min, group_size.
    #[arg(long)]
    sweep: Option<String>,
    /// Arms written to the CSV.
    #[arg(long, value_delimiter = ',', default_value = "with,without")]
    arms: Vec<String>,
    /// Smallest acceptable lower confidence bound of TP(with)/TP(without).
    #[arg(long, default_value_t = 0.99)]
    min_ratio: f64,
}

#[derive(Serialize)]
struct SummaryRow {
    param: String,
    value: f64,
    replications: u32,
    with_mean: f64,
    with_lo: f64,
    with_hi: f64,
    without_mean: f64,
    without_lo: f64,
    without_hi: f64,
    ratio_mean: f64,
    ratio_lo: f64,
    ratio_hi: f64,
}

fn parse_arm(s: &str) -> Result<Arm> {
    match s.trim() {
        "with" => Ok(Arm::With),
        "without" => Ok(Arm::Without),
        other => Err(config_error(format!("unknown arm {other:?}; expected with or without"))),
    }
}

fn load(args: &Args) -> Result<SimConfig> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", p.display())))?
        }
        None => SimConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    cfg.validate().map_err(config_error)?;
    Ok(cfg)
}

pub fn run(args: &Args, out: &Path) -> Result<Status> {
    let cfg = load(args)?;
    let mut arms = Vec::new();
    for a in &args.arms {
        let arm = parse_arm(a)?;
        if !arms.contains(&arm) {
            arms.push(arm);
        }
    }
    let sweep = args.sweep.as_deref().map(Sweep::parse).transpose().map_err(config_error)?;

    let (param, points): (String, Vec<(f64, SimResult)>) = match &sweep {
        Some(s) => {
            let pts = run_sweep(&cfg, s).map_err(config_error)?;
            (s.param.name().into(), pts.into_iter().map(|p| (p.value, p.result)).collect())
        }
        None => ("base".into(), vec![(0.0, run_throughput_sim(&cfg).map_err(config_error)?)]),
    };

    let summary: Vec<SummaryRow> = points
        .iter()
        .map(|(value, r)| SummaryRow {
            param: param.clone(),
            value: *value,
            replications: r.config.replications,
            with_mean: r.with_ci.mean,
            with_lo: r.with_ci.lo,
            with_hi: r.with_ci.hi,
            without_mean: r.without_ci.mean,
            without_lo: r.without_ci.lo,
            without_hi: r.without_ci.hi,
            ratio_mean: r.ratio.mean,
            ratio_lo: r.ratio.lo,
            ratio_hi: r.ratio.hi,
        })
        .collect();

    let t = &points[0].1.times;
    println!(
        "protocol delays: join {:.3} ms, group setup {:.3} ms, key update {:.3} ms; expected arrivals/period {:.1}",
        t.join_ms,
        t.group_setup_ms,
        t.key_update_ms,
        cfg.expected_arrivals()
    );
    println!(
        "{:<14} {:>8} {:>26} {:>26} {:>26}",
        param, "value", "TP with [95% CI]", "TP without [95% CI]", "ratio [95% CI]"
    );
    for s in &summary {
        println!(
            "{:<14} {:>8.3} {:>8.3} [{:>7.3},{:>7.3}] {:>8.3} [{:>7.3},{:>7.3}] {:>8.5} [{:>7.5},{:>7.5}]",
            "",
            s.value,
            s.with_mean,
            s.with_lo,
            s.with_hi,
            s.without_mean,
            s.without_lo,
            s.without_hi,
            s.ratio_mean,
            s.ratio_lo,
            s.ratio_hi
        );
    }

    let mut ok = true;
    if cfg.replications < 2 {
        println!("ratio check skipped: a confidence bound needs at least 2 replications");
    } else {
        let worst = summary.iter().map(|s| s.ratio_lo).fold(f64::INFINITY, f64::min);
        let ratio_ok = worst >= args.min_ratio;
        println!("ratio lower bound >= {}: {} (worst {worst:.5})", args.min_ratio, verdict(ratio_ok));
        ok &= ratio_ok;
    }
    if sweep.as_ref().is_some_and(|s| s.param == SweepParam::ServiceMin) {
        let non_increasing = |f: fn(&SummaryRow) -> f64| summary.windows(2).all(|w| f(&w[1]) <= f(&w[0]));
        let mono = non_increasing(|s| s.with_mean) && non_increasing(|s| s.without_mean);
        println!("TP means non-increasing in service time: {}", verdict(mono));
        ok &= mono;
    }
    let status = if ok { Status::Ok } else { Status::ThresholdMiss };

    let borrowed: Vec<(f64, &SimResult)> = points.iter().map(|(v, r)| (*v, r)).collect();
    let mut dir = RunDir::create(out, "simulate", cfg.seed)?;
    dir.write("config.toml", toml::to_string(&cfg)?)?;
    dir.write_csv("tp.csv", rows(&param, &borrowed, &arms))?;
    dir.write_csv("summary.csv", &summary)?;
    let resolved = serde_json::json!({ "sim": cfg, "sweep": sweep, "arms": arms, "min_ratio": args.min_ratio });
    let path = dir.finish(resolved, status.code())?;
    eprintln!("wrote {}", path.display());
    Ok(status)
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
