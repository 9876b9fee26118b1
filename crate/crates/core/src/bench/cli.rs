//! Command-line front end.
//!
//! Exit codes: 0 when every method ran and every audit and check passed,
//! 1 when a method errored or a bound was violated, 2 for usage, config
//! and I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::dvector;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::{instance_constants, prepare, Constants, ExperimentReport, RunOptions};
use super::output::{to_json, write_atomic, write_report, Format};
use super::{run_experiment, BenchError};
use crate::isometry::{compose_all, AffineIsometry};
use crate::numerics::Tolerance;
use crate::subspace::AffineSubspace;

/// Config used by `demo`: two lines through the origin at 45° in ℝ².
pub const DEMO_CONFIG: &str = include_str!("../../configs/demo.toml");

const DEFAULT_OUT: &str = "cimbench-out";

#[derive(Debug, Parser)]
#[command(name = "cimbench", version, about = "Circumcentered-method benchmarks with rate audits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (default: the config's output_dir, else cimbench-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Iteration count overriding the config and every method entry.
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every method and audit it against its rate.
    Run { config: PathBuf },
    /// Compute the rate constants of the instance without iterating.
    Rates { config: PathBuf },
    /// Run with the invariant checks and no early stopping.
    Verify { config: PathBuf },
    /// Verify the built-in 45° instance and print a reflector fixed set.
    Demo,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Runs a parsed command; `Ok(false)` means a method or audit failed.
pub fn execute(cli: &Cli) -> Result<bool, BenchError> {
    match &cli.command {
        Command::Run { config } => experiment(cli, &ExperimentConfig::load(config)?, false),
        Command::Verify { config } => experiment(cli, &ExperimentConfig::load(config)?, true),
        Command::Rates { config } => rates(cli, &ExperimentConfig::load(config)?),
        Command::Demo => {
            let cfg = ExperimentConfig::from_toml(DEMO_CONFIG).map_err(|message| {
                BenchError::Config {
                    path: "configs/demo.toml".into(),
                    message,
                }
            })?;
            let ok = experiment(cli, &cfg, true)?;
            let fixed = fixed_set_example(&out_dir(cli, &cfg))?;
            Ok(ok && fixed)
        }
    }
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn experiment(cli: &Cli, cfg: &ExperimentConfig, verify: bool) -> Result<bool, BenchError> {
    let opts = RunOptions {
        seed: cli.seed,
        max_iters: cli.max_iters,
        verify,
        embed_traces: cli.format == Format::Json,
    };
    let report = run_experiment(cfg, &opts)?;
    let dir = out_dir(cli, cfg);
    write_report(&report, &dir, cli.format)?;
    print_report(&report);
    println!("wrote {}", dir.display());
    Ok(report.passed)
}

fn print_report(r: &ExperimentReport) {
    println!(
        "{} (n={}, seed={}, intersection dim {})",
        r.name, r.ambient_dim, r.seed, r.instance.intersection_dim
    );
    println!(
        "{:<18} {:<14} {:>12} {:>8} {:>12} {:>7} {:>10}",
        "method", "kind", "final_error", "k@1e-10", "rate", "audit", "time_ms"
    );
    for m in &r.methods {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4e}"));
        let audit = if m.error.is_some() {
            "ERROR"
        } else if m.audits.is_empty() {
            "n/a"
        } else if m.passed() {
            "ok"
        } else {
            "FAIL"
        };
        let time = m
            .raw
            .as_ref()
            .map_or("-".to_string(), |t| format!("{:.3}", t.wall_time.as_secs_f64() * 1e3));
        println!(
            "{:<18} {:<14} {:>12} {:>8} {:>12} {:>7} {:>10}",
            m.name,
            m.method.as_str(),
            fmt(m.final_error),
            m.iterations_to_1e_10.map_or("-".to_string(), |k| k.to_string()),
            fmt(m.theoretical_rate),
            audit,
            time
        );
        if let Some(e) = &m.error {
            println!("    error: {e}");
        }
        for a in m.audits.iter().filter(|a| !a.all_satisfied()) {
            let bad = a.per_iteration.iter().filter(|row| !row.satisfied).count();
            println!("    {} violated at {bad} iterations", a.constant_name);
        }
    }
    for c in &r.checks {
        let flag = if c.passed { "ok" } else { "FAIL" };
        println!("check {:<24} {:<4} {:.3e}  {}", c.name, flag, c.value, c.detail);
    }
    println!("{}", if r.passed { "PASS" } else { "FAIL" });
}

#[derive(Serialize)]
struct RatesFile<'a> {
    name: &'a str,
    seed: u64,
    constants: &'a Constants,
}

fn rates(cli: &Cli, cfg: &ExperimentConfig) -> Result<bool, BenchError> {
    let setup = prepare(cfg, cli.seed)?;
    let constants = instance_constants(&setup);
    let dir = out_dir(cli, cfg);
    std::fs::create_dir_all(&dir).map_err(|source| BenchError::Io {
        path: dir.clone(),
        source,
    })?;
    let file = RatesFile {
        name: &cfg.name,
        seed: setup.seed,
        constants: &constants,
    };
    write_atomic(&dir.join("rates.json"), &to_json(&file))?;
    println!("{} (n={}, m={})", cfg.name, setup.n(), setup.m());
    for (k, v) in &constants.values {
        println!("{k:<12} {v:.12}");
    }
    for (k, e) in &constants.errors {
        println!("{k:<12} unavailable: {e}");
    }
    Ok(true)
}

#[derive(Serialize)]
struct FixedSetFile {
    lines: Vec<[f64; 2]>,
    fixed_dim: usize,
    fixed_direction: Vec<f64>,
    intersection_dim: usize,
}

/// `Fix R_3 R_2 R_1` for the lines spanned by (1,0), (1,1), (0,1): the
/// line through (1,1), although the three lines only meet at the origin.
fn fixed_set_example(dir: &Path) -> Result<bool, BenchError> {
    let tol = Tolerance::default();
    let dirs = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let lines = dirs
        .iter()
        .map(|d| AffineSubspace::linear(2, &[dvector![d[0], d[1]]], &tol))
        .collect::<crate::Result<Vec<_>>>()?;
    let refl: Vec<AffineIsometry> = lines.iter().map(AffineIsometry::reflector).collect();
    let t = compose_all(&refl, 2)?;
    let fix = t
        .fixed_point_set(&tol)
        .ok_or(crate::Error::NoCommonFixedPoint { residual: f64::NAN })?;
    let inter = crate::intersect(&lines, &tol)?.into_result()?;
    let mut direction: Vec<f64> = fix.basis().iter().copied().collect();
    if direction.first().is_some_and(|v| *v < 0.0) {
        direction.iter_mut().for_each(|v| *v = -*v);
    }
    println!(
        "Fix R3 R2 R1 for lines along (1,0), (1,1), (0,1): dim {}, direction {:?}; \
         the lines intersect in dim {}",
        fix.dim(),
        direction,
        inter.dim()
    );
    let file = FixedSetFile {
        lines: dirs.to_vec(),
        fixed_dim: fix.dim(),
        fixed_direction: direction.clone(),
        intersection_dim: inter.dim(),
    };
    write_atomic(&dir.join("fixed_set.json"), &to_json(&file))?;
    let h = 0.5f64.sqrt();
    Ok(fix.dim() == 1
        && direction.len() == 2
        && (direction[0] - h).abs() < 1e-10
        && (direction[1] - h).abs() < 1e-10)
}
