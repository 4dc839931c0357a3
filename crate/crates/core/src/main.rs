use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use regional_planner::arbiter::{Arbiter, ArbiterConfig, ArbiterState};
use regional_planner::gridmap::{generate_perlin_map, load_map, store_map, PerlinMapParams};
use regional_planner::harness::{
    alpha_sweep, read_cycles_jsonl, run_scenario, write_cycles_jsonl, Scenario,
};
use regional_planner::lattice::Pose;
use regional_planner::metrics::{summarize, write_summary_csv, DEFAULT_THRESHOLD};

#[derive(Parser)]
#[command(name = "regional-planner", version, about = "Lattice regional planner with plan arbitration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a gradient-noise obstacle map.
    GenMap {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long, default_value_t = 0.2)]
        resolution: f64,
        #[arg(long)]
        threshold: f64,
        #[arg(long, default_value_t = 1.0)]
        v_max: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one planning cycle from a start pose.
    Plan {
        #[arg(long)]
        map: PathBuf,
        /// x,y,heading
        #[arg(long)]
        start: String,
        /// x,y
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate a scenario and write its cycle log.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "run")]
        label: String,
    },
    /// Run every alpha plus the baseline over reseeded scenarios.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.95,0.96,0.97,0.98,0.99,0.999")]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        reps: u32,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cycles_out: Option<PathBuf>,
    },
    /// Summarize a cycle log per configuration label.
    Metrics {
        #[arg(long)]
        cycles: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_numbers(text: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("{what} must be {n} comma-separated numbers, got {text:?}"))?;
    if v.len() != n {
        bail!("{what} must be {n} comma-separated numbers, got {text:?}");
    }
    Ok(v)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    serde_json::from_slice(&read(path)?)
        .with_context(|| format!("{} is not a valid scenario", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenMap {
            seed,
            width,
            height,
            resolution,
            threshold,
            v_max,
            out,
        } => {
            let params = PerlinMapParams {
                resolution,
                v_max,
                ..PerlinMapParams::new(seed, width, height, threshold)
            };
            write(&out, &store_map(&generate_perlin_map(&params)?))
        }
        Command::Plan {
            map,
            start,
            goal,
            alpha,
            budget,
            out,
        } => {
            let map = load_map(&read(&map)?).context("cannot load map")?;
            let s = parse_numbers(&start, 3, "--start")?;
            let g = parse_numbers(&goal, 2, "--goal")?;
            let mut config = ArbiterConfig::with_alpha(alpha);
            if let Some(b) = budget {
                config.search.expansion_budget = b;
            }
            let arbiter = Arbiter::new(config, map.resolution())?;
            let outcome = arbiter.plan_cycle(
                &ArbiterState::default(),
                &Pose::new(s[0], s[1], s[2]),
                (g[0], g[1]),
                &map,
            )?;
            let mut buf = Vec::new();
            write_cycles_jsonl(&mut buf, &[outcome.record])?;
            write(&out, &buf)
        }
        Command::Simulate {
            scenario,
            out,
            label,
        } => {
            let s = load_scenario(&scenario)?;
            let log = run_scenario(&s, &label)?;
            let mut buf = Vec::new();
            write_cycles_jsonl(&mut buf, &log.cycles)?;
            write(&out, &buf)?;
            println!(
                "{}",
                serde_json::json!({
                    "digest": log.digest,
                    "outcome": log.outcome,
                    "cycles": log.cycles.len(),
                    "total_path_length": log.total_path_length,
                })
            );
            Ok(())
        }
        Command::Sweep {
            scenario,
            alphas,
            reps,
            threshold,
            out,
            cycles_out,
        } => {
            let s = load_scenario(&scenario)?;
            let result = alpha_sweep(&s, &alphas, reps, threshold)?;
            let mut buf = Vec::new();
            write_summary_csv(&mut buf, &result.summaries)?;
            write(&out, &buf)?;
            if let Some(path) = cycles_out {
                let mut buf = Vec::new();
                write_cycles_jsonl(&mut buf, &result.cycles)?;
                write(&path, &buf)?;
            }
            Ok(())
        }
        Command::Metrics {
            cycles,
            threshold,
            out,
        } => {
            let text = String::from_utf8(read(&cycles)?).context("cycle log is not UTF-8")?;
            let records = read_cycles_jsonl(&text)
                .with_context(|| format!("{} is not a cycle log", cycles.display()))?;
            let mut groups: Vec<(String, Option<f64>, Vec<f64>)> = Vec::new();
            for r in &records {
                let k = match groups.iter().position(|g| g.0 == r.label) {
                    Some(k) => k,
                    None => {
                        groups.push((r.label.clone(), r.alpha, Vec::new()));
                        groups.len() - 1
                    }
                };
                groups[k].2.extend(r.mhd);
            }
            let rows: Vec<_> = groups
                .iter()
                .map(|(label, alpha, values)| summarize(values, threshold, label, *alpha))
                .collect();
            let mut buf = Vec::new();
            write_summary_csv(&mut buf, &rows)?;
            write(&out, &buf)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
