//! `oic`: feasibility checks, signaling plans and capacity-bound sweeps for
//! MISO optical intensity channels.
//!
//! Exit status: 0 on success, 1 on malformed input, 2 when the distribution is
//! not admissible for the channel (or, for `verify`, when a check fails).

mod input;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use input::{load_channel, load_dist, maxent_law};
use oic_core::signals::{ook_bc, ook_ec};
use oic_core::{
    bc_allocation, canonicalize, check_bc, check_ec, maximally_convex, mutual_info,
    sort_and_merge, BoundedDist, BoundsEvaluator, DiscreteDist, Distribution, Kind, Signaler,
    SweepConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "oic", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Checks whether a distribution of the equivalent input is admissible.
    Feasible {
        channel: PathBuf,
        dist: PathBuf,
        #[arg(long, default_value = "ec")]
        kind: Kind,
    },
    /// Per-antenna intensities for given values of the equivalent input.
    Decompose {
        channel: PathBuf,
        dist: PathBuf,
        /// Values of the equivalent input in [0, 1].
        #[arg(allow_negative_numbers = true)]
        s: Vec<f64>,
        #[arg(long, default_value = "ec")]
        kind: Kind,
        /// Evaluate at i/N for i = 0..=N instead of explicit values.
        #[arg(long, value_name = "N")]
        grid: Option<usize>,
        /// Write the interval partition as JSON.
        #[arg(long, value_name = "FILE")]
        plan_out: Option<PathBuf>,
    },
    /// Capacity bounds over a log-spaced noise grid, as CSV.
    Bounds {
        channel: PathBuf,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Solves the max-entropy problem and prints the solution as JSON.
    Maxent {
        channel: PathBuf,
        #[arg(long, default_value = "ec")]
        kind: Kind,
    },
    /// Checks that the mutual information of admissible inputs lies between the bounds.
    Verify {
        channel: PathBuf,
        #[command(flatten)]
        sweep: Sweep,
        /// Seed for the randomly drawn admissible inputs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random admissible inputs.
        #[arg(long, default_value_t = 2)]
        random: usize,
    },
}

#[derive(Args)]
struct Sweep {
    #[arg(long, default_value = "ec")]
    kind: Kind,
    #[arg(long, default_value_t = 1e-4)]
    sigma_min: f64,
    #[arg(long, default_value_t = 10.0)]
    sigma_max: f64,
    #[arg(long, default_value_t = 40)]
    points: usize,
}

impl Sweep {
    fn config(&self) -> SweepConfig {
        SweepConfig {
            sigma_min: self.sigma_min,
            sigma_max: self.sigma_max,
            points: self.points,
            kind: self.kind,
        }
    }
}

/// Twelve significant digits.
fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn feasible(channel: PathBuf, dist: PathBuf, kind: Kind) -> Result<ExitCode> {
    let ch = load_channel(&channel)?;
    let d = load_dist(&dist, &ch.spec, kind)?;
    let (sorted, _) = sort_and_merge(&ch.spec);
    let report = match kind {
        Kind::Ec => check_ec(&d, &sorted),
        Kind::Bc => check_bc(&d, &sorted),
    };
    let mut value = json!({
        "kind": kind,
        "feasible": report.feasible,
        "mean": d.mean(),
        "target_mean": sorted.mean_intensity(),
        "mean_residual": report.mean_residual,
        "slack": report.slack,
    });
    if kind == Kind::Bc && report.feasible {
        value["allocation"] = serde_json::to_value(bc_allocation(&d, &sorted)?)?;
    }
    emit(&format!("{}\n", serde_json::to_string_pretty(&value)?))?;
    Ok(if report.feasible { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn decompose(
    channel: PathBuf,
    dist: PathBuf,
    s: Vec<f64>,
    kind: Kind,
    grid: Option<usize>,
    plan_out: Option<PathBuf>,
) -> Result<ExitCode> {
    let values: Vec<f64> = match grid {
        Some(0) => bail!("--grid must be positive"),
        Some(n) => (0..=n).map(|i| i as f64 / n as f64).collect(),
        None => s,
    };
    if values.is_empty() {
        bail!("no input values: pass values of s or --grid N");
    }
    let ch = load_channel(&channel)?;
    let d = load_dist(&dist, &ch.spec, kind)?;
    let sig = Signaler::new(&ch.spec, kind, &d, ch.peaks.clone())?;
    if let Some(path) = plan_out {
        std::fs::write(&path, serde_json::to_string_pretty(sig.plan())? + "\n")?;
    }
    let n = ch.spec.n();
    let mut out = String::from("s");
    for k in 1..=n {
        write!(out, ",x_{k}")?;
    }
    if ch.peaks.is_some() {
        for k in 1..=n {
            write!(out, ",x_raw_{k}")?;
        }
    }
    out.push('\n');
    for v in values {
        let signal = sig.signal(v)?;
        out.push_str(&num(v));
        for x in signal.x.iter().chain(signal.raw.iter().flatten()) {
            write!(out, ",{}", num(*x))?;
        }
        out.push('\n');
    }
    emit(&out)?;
    Ok(ExitCode::SUCCESS)
}

fn bounds(channel: PathBuf, sweep: Sweep) -> Result<ExitCode> {
    let ch = load_channel(&channel)?;
    let ev = BoundsEvaluator::new(&ch.spec, sweep.kind)?;
    let rows = ev.sweep(&sweep.config())?;
    let mut out = String::from("sigma,snr_db,lower_epi,upper_maxvar,upper_duality,best_lower,best_upper,gap\n");
    for r in rows {
        let snr_db = -20.0 * r.sigma.log10();
        let fields = [
            r.sigma,
            snr_db,
            r.lower_epi,
            r.upper_maxvar,
            r.upper_duality,
            r.best_lower,
            r.best_upper,
            r.gap,
        ];
        let line: Vec<String> = fields.iter().map(|&x| num(x)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    writeln!(out, "# low_snr_slope={}", num(ev.low_snr_slope()))?;
    writeln!(out, "# high_snr_offset={}", num(ev.high_snr_offset()))?;
    emit(&out)?;
    Ok(ExitCode::SUCCESS)
}

fn maxent(channel: PathBuf, kind: Kind) -> Result<ExitCode> {
    let ch = load_channel(&channel)?;
    let (canon, red) = canonicalize(&ch.spec, kind);
    let ev = BoundsEvaluator::new(&ch.spec, kind)?;
    let law = maxent_law(&ch.spec, kind)?;
    let law = law.as_pwexp().expect("max-entropy law is piecewise exponential");
    let value = json!({
        "kind": kind,
        "gamma": ev.solution().gamma,
        "high_snr_offset": ev.high_snr_offset(),
        "low_snr_slope": ev.low_snr_slope(),
        "reduced": { "h": canon.h(), "alpha": canon.alpha(), "flipped": red.flipped, "clamped": red.clamped },
        "solution": ev.solution(),
        "law": {
            "type": "pwexp",
            "nu0": law.nu0(),
            "lambdas": law.lambdas(),
            "breakpoints": law.breakpoints(),
        },
    });
    emit(&format!("{}\n", serde_json::to_string_pretty(&value)?))?;
    Ok(ExitCode::SUCCESS)
}

/// A law below the maximally convex one in convex order, optionally with extra
/// mass at zero (admissible for bounded cost only).
fn random_admissible(rng: &mut ChaCha8Rng, top: &DiscreteDist, kind: Kind) -> Result<DiscreteDist> {
    let m = top.mean();
    let atoms: Vec<(f64, f64)> = top.atoms().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < atoms.len() {
        let len = rng.random_range(1..=2).min(atoms.len() - i);
        let group = &atoms[i..i + len];
        let p: f64 = group.iter().map(|a| a.1).sum();
        let x = group.iter().map(|a| a.0 * a.1).sum::<f64>() / p;
        out.push((x, p));
        i += len;
    }
    let t: f64 = rng.random_range(0.3..1.0);
    let mut out: Vec<(f64, f64)> = out.iter().map(|&(x, p)| (m + t * (x - m), p)).collect();
    if kind == Kind::Bc {
        let w: f64 = rng.random_range(0.0..0.5);
        out = out.iter().map(|&(x, p)| (x, p * (1.0 - w))).collect();
        out.push((0.0, w));
    }
    Ok(DiscreteDist::from_atoms(&out)?)
}

fn verify(channel: PathBuf, sweep: Sweep, seed: u64, random: usize) -> Result<ExitCode> {
    let ch = load_channel(&channel)?;
    let kind = sweep.kind;
    let cfg = sweep.config();
    cfg.validate()?;
    let ev = BoundsEvaluator::new(&ch.spec, kind)?;
    let spec = ev.spec();
    let top = maximally_convex(spec)?;
    let ook = match kind {
        Kind::Ec => ook_ec(spec)?,
        Kind::Bc => ook_bc(spec)?,
    };
    let mut inputs: Vec<(String, BoundedDist)> = vec![
        ("maximally_convex".into(), top.clone().into()),
        ("maxent".into(), ev.solution().density.clone().into()),
        ("ook".into(), ook.into()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random {
        inputs.push((format!("random_{}", i + 1), random_admissible(&mut rng, &top, kind)?.into()));
    }
    let tasks: Vec<(f64, usize)> = cfg
        .sigmas()
        .into_iter()
        .flat_map(|s| (0..inputs.len()).map(move |k| (s, k)))
        .collect();
    let results: Vec<_> = tasks
        .par_iter()
        .map(|&(sigma, k)| {
            let report = ev.report(sigma);
            let mi = mutual_info(&inputs[k].1, sigma);
            (report, mi)
        })
        .collect();
    let mut out = String::from("sigma,input,mutual_info,best_lower,best_upper,holds\n");
    let mut all = true;
    for (&(sigma, k), (report, mi)) in tasks.iter().zip(results) {
        let mi = mi?;
        let tol = 1e-9 + mi.estimated_error;
        let mi = mi.value;
        let (name, _) = &inputs[k];
        // every admissible input sits under the upper bound; the entropy-power
        // bound is a statement about the max-entropy input only
        let mut holds = mi <= report.best_upper + tol;
        if name == "maxent" {
            holds &= mi >= report.best_lower - tol;
        }
        all &= holds;
        writeln!(
            out,
            "{},{name},{},{},{},{holds}",
            num(sigma),
            num(mi),
            num(report.best_lower),
            num(report.best_upper)
        )?;
    }
    emit(&out)?;
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

/// Inadmissible distributions exit with 2, everything else with 1.
fn exit_code(err: &anyhow::Error) -> ExitCode {
    match err.downcast_ref::<oic_core::Error>() {
        Some(oic_core::Error::Infeasible(_)) | Some(oic_core::Error::MeanMismatch { .. }) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Feasible { channel, dist, kind } => feasible(channel, dist, kind),
        Command::Decompose {
            channel,
            dist,
            s,
            kind,
            grid,
            plan_out,
        } => decompose(channel, dist, s, kind, grid, plan_out),
        Command::Bounds { channel, sweep } => bounds(channel, sweep),
        Command::Maxent { channel, kind } => maxent(channel, kind),
        Command::Verify {
            channel,
            sweep,
            seed,
            random,
        } => verify(channel, sweep, seed, random),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code(&err)
        }
    }
}
