use std::path::Path;

use anyhow::Result;
use rsms_core::crypto::curve;
use rsms_core::sim::costs::{byte_scaling, reference_cost, ReferenceCost, Scaling};
use rsms_core::sim::{measure_costs, message_sizes, ProtocolPhase, Role, TimingTable};
use serde::Serialize;

use crate::output::RunDir;
use crate::{config_error, Status};

#[derive(clap::Args)]
pub struct Args {
    /// RNs in the group for group phases.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest group size in the byte-scaling fit.
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    /// Runs per primitive when timing this host; 0 skips host timing.
    #[arg(long, default_value_t = 200)]
    host_iterations: u32,
}

#[derive(Serialize)]
struct CountRow {
    phase: &'static str,
    role: &'static str,
    n: usize,
    point_mul: u64,
    point_add: u64,
    hash: u64,
    inversion: u64,
    bf_check: u64,
    pk_encrypt: u64,
    pk_decrypt: u64,
    point_mask: u64,
    /// Operations outside the published formula (consistency checks).
    extra_ops: u64,
    paper_point_mul: Option<u64>,
    paper_point_add: Option<u64>,
    paper_hash: Option<u64>,
    paper_inversion: Option<u64>,
    paper_bf_check: Option<u64>,
    bits_sent: u64,
    paper_bits: Option<u64>,
    delta: String,
}

#[derive(Serialize)]
struct SizeRow {
    kind: &'static str,
    phase: &'static str,
    link: &'static str,
    bytes: u64,
    bits: u64,
    paper_bits: Option<u64>,
}

#[derive(Serialize)]
struct ScalingRow {
    phase: &'static str,
    role: &'static str,
    payload_slope_bytes: f64,
    wire_slope_bytes: f64,
    two_point_bytes: usize,
    max_residual: f64,
}

fn delta(ours: [u64; 5], paper: &ReferenceCost) -> String {
    let names = ["point_mul", "point_add", "hash", "inversion", "bf_check"];
    let theirs = [paper.point_mul, paper.point_add, paper.hash, paper.inversion, paper.bf_check];
    let parts: Vec<String> = names
        .iter()
        .zip(ours.iter().zip(theirs))
        .filter(|(_, (a, b))| **a != *b)
        .map(|(n, (a, b))| format!("{n} {:+}", *a as i64 - b as i64))
        .collect();
    parts.join("; ")
}

fn count_rows(n: usize, seed: u64) -> Vec<CountRow> {
    let mut out = Vec::new();
    for phase in ProtocolPhase::ALL {
        for &role in phase.roles() {
            let Some(c) = measure_costs(phase, role, n, seed) else { continue };
            // The MSRP's update goes to every retained member and one replacement.
            let ref_n = if (phase, role) == (ProtocolPhase::KeyUpdate, Role::Msrp) { n + 1 } else { n };
            let paper = reference_cost(phase, role, ref_n as u64);
            let k = c.tally.core;
            let ours = [k.point_mul, k.point_add, k.hash, k.inversion, k.bf_check];
            let e = c.tally.extra;
            out.push(CountRow {
                phase: phase.name(),
                role: role.name(),
                n: c.n,
                point_mul: k.point_mul,
                point_add: k.point_add,
                hash: k.hash,
                inversion: k.inversion,
                bf_check: k.bf_check,
                pk_encrypt: k.pk_encrypt,
                pk_decrypt: k.pk_decrypt,
                point_mask: k.point_mask,
                extra_ops: e.point_mul + e.point_add + e.hash + e.inversion + e.bf_check + e.point_mask,
                paper_point_mul: paper.map(|p| p.point_mul),
                paper_point_add: paper.map(|p| p.point_add),
                paper_hash: paper.map(|p| p.hash),
                paper_inversion: paper.map(|p| p.inversion),
                paper_bf_check: paper.map(|p| p.bf_check),
                bits_sent: c.bytes_sent * 8,
                paper_bits: paper.and_then(|p| p.bits),
                delta: paper.map_or_else(|| "no published value".into(), |p| delta(ours, &p)),
            });
        }
    }
    out
}

fn opt(v: Option<u64>) -> String {
    v.map_or_else(|| "-".into(), |v| v.to_string())
}

pub fn run(args: &Args, out: &Path) -> Result<Status> {
    if args.n == 0 || args.max_n < 2 {
        return Err(config_error("--n must be at least 1 and --max-n at least 2"));
    }
    let counts = count_rows(args.n, args.seed);
    println!("Operation counts per role (N = {} RNs); ours / published", args.n);
    println!(
        "{:<17} {:<6} {:>7} {:>7} {:>7} {:>7} {:>7} {:>5} {:>6} {:>11}  delta",
        "phase", "role", "mul", "add", "hash", "inv", "bf", "pke", "extra", "bits"
    );
    for r in &counts {
        println!(
            "{:<17} {:<6} {:>7} {:>7} {:>7} {:>7} {:>7} {:>5} {:>6} {:>11}  {}",
            r.phase,
            r.role,
            format!("{}/{}", r.point_mul, opt(r.paper_point_mul)),
            format!("{}/{}", r.point_add, opt(r.paper_point_add)),
            format!("{}/{}", r.hash, opt(r.paper_hash)),
            format!("{}/{}", r.inversion, opt(r.paper_inversion)),
            format!("{}/{}", r.bf_check, opt(r.paper_bf_check)),
            r.pk_encrypt + r.pk_decrypt,
            r.extra_ops,
            format!("{}/{}", r.bits_sent, opt(r.paper_bits)),
            r.delta
        );
    }

    let sizes: Vec<SizeRow> = message_sizes(args.n)
        .into_iter()
        .map(|m| SizeRow {
            kind: m.kind.label(),
            phase: m.phase.name(),
            link: m.link,
            bytes: m.bytes,
            bits: m.bits(),
            paper_bits: m.paper_bits,
        })
        .collect();
    println!(
        "\nSerialized message sizes ({}: point {} B, scalar {} B)",
        curve::NAME,
        curve::POINT_BYTES,
        curve::SCALAR_BYTES
    );
    println!("{:<22} {:<17} {:<13} {:>6} {:>6} {:>10}", "message", "phase", "link", "bytes", "bits", "published");
    for s in &sizes {
        println!(
            "{:<22} {:<17} {:<13} {:>6} {:>6} {:>10}",
            s.kind,
            s.phase,
            s.link,
            s.bytes,
            s.bits,
            opt(s.paper_bits)
        );
    }

    let ns: Vec<usize> = (1..=args.max_n).collect();
    let scaling: Vec<Scaling> = [
        (ProtocolPhase::GroupAllocation, Role::Msrp),
        (ProtocolPhase::GroupMembership, Role::Party),
        (ProtocolPhase::KeyAgreement, Role::Party),
        (ProtocolPhase::KeyUpdate, Role::Msrp),
    ]
    .into_iter()
    .filter_map(|(p, r)| byte_scaling(p, r, &ns, args.seed))
    .collect();
    let scaling_rows: Vec<ScalingRow> = scaling
        .iter()
        .map(|s| ScalingRow {
            phase: s.phase.name(),
            role: s.role.name(),
            payload_slope_bytes: s.payload_slope,
            wire_slope_bytes: s.wire_slope,
            two_point_bytes: 2 * curve::POINT_BYTES,
            max_residual: s.max_residual,
        })
        .collect();
    println!(
        "\nBytes sent per additional RN, N = 1..={} (two encoded points = {} B)",
        args.max_n,
        2 * curve::POINT_BYTES
    );
    println!("{:<17} {:<6} {:>14} {:>12} {:>10}", "phase", "role", "payload B/N", "wire B/N", "residual");
    for s in &scaling_rows {
        println!(
            "{:<17} {:<6} {:>14.2} {:>12.2} {:>10.2e}",
            s.phase, s.role, s.payload_slope_bytes, s.wire_slope_bytes, s.max_residual
        );
    }

    let published = TimingTable::default();
    let host = (args.host_iterations > 0).then(|| TimingTable::host(args.host_iterations));
    println!("\nPrimitive timings (ms): published / this host");
    let row = |name: &str, p: f64, h: Option<f64>| {
        println!("{name:<10} {p:>9.4} {:>12}", h.map_or_else(|| "-".into(), |h| format!("{h:.4}")));
    };
    row("point_mul", published.point_mul, host.map(|h| h.point_mul));
    row("point_add", published.point_add, host.map(|h| h.point_add));
    row("hash", published.hash, host.map(|h| h.hash));
    row("mod_mul", published.mod_mul, host.map(|h| h.mod_mul));
    row("mod_exp", published.mod_exp, host.map(|h| h.mod_exp));
    row("inversion", published.inversion, host.map(|h| h.inversion));
    row("bf_check", published.bf_check, host.map(|h| h.bf_check));
    row("pk_op", published.pk_op, host.map(|h| h.pk_op));

    let mut dir = RunDir::create(out, "costs", args.seed)?;
    dir.write_csv("counts.csv", &counts)?;
    dir.write_csv("sizes.csv", &sizes)?;
    dir.write_csv("scaling.csv", &scaling_rows)?;
    // Host timings vary between runs, so they stay out of the CSVs.
    dir.write_json("timings.json", &serde_json::json!({ "published": published, "host": host }))?;
    let config = serde_json::json!({
        "n": args.n, "seed": args.seed, "max_n": args.max_n, "host_iterations": args.host_iterations
    });
    let path = dir.finish(config, Status::Ok.code())?;
    eprintln!("wrote {}", path.display());
    Ok(Status::Ok)
}
