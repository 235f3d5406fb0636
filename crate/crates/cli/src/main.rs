use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use fdcr_core::experiment::{emit_csv, emit_table, run_sweep, SweepSpec};
use fdcr_core::optimizer::{Mode, Schedule, SolverOptions};
use fdcr_core::partition::{solve_cga, PartitionInstance};
use fdcr_core::selection::{select, Selection};
use fdcr_core::{generate_channels, ScenarioConfig};
use serde::Serialize;

/// Power allocation, phase regulation and relay selection for full-duplex
/// cognitive relays sharing spectrum with a radar.
///
/// Sweeps run trials in parallel; set RAYON_NUM_THREADS to bound the
/// number of worker threads.
#[derive(Parser)]
#[command(name = "fdcr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one channel draw and print the result as JSON.
    Solve {
        /// Scenario configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// noncoherent or coherent.
        #[arg(long, default_value = "coherent")]
        mode: Mode,
        /// greedy1, greedy2 or grid_oracle.
        #[arg(long, default_value = "greedy1")]
        schedule: Schedule,
        /// all (every relay active), mrs or srs.
        #[arg(long, default_value = "mrs")]
        selection: Selection,
        /// Grid resolution per dimension for grid_oracle.
        #[arg(long, default_value_t = 41)]
        grid_points: usize,
    },
    /// Split numbers into two sets of near-equal sum.
    Partition {
        #[arg(required = true, num_args = 1..)]
        values: Vec<f64>,
        /// Stop once a split this close is found; defaults to 1e-9 of the total.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run a Monte-Carlo sweep and write the aggregated rows as CSV.
    Sweep {
        /// Sweep specification (JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Omit solve times so that reruns produce identical files.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Serialize)]
struct ErrorRecord {
    error: String,
    causes: Vec<String>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            config,
            seed,
            mode,
            schedule,
            selection,
            grid_points,
        } => {
            let cfg: ScenarioConfig = read_json(&config)?;
            let ch = generate_channels(&cfg, seed)?;
            let opts = SolverOptions::new(mode, schedule).with_grid_points(grid_points);
            let result = select(&ch, &cfg, selection, &opts)?;
            println!("{}", serde_json::to_string_pretty(&result)?);
        }
        Command::Partition { values, epsilon } => {
            let instance = match epsilon {
                Some(e) => PartitionInstance::new(values, e)?,
                None => PartitionInstance::with_default_epsilon(values)?,
            };
            println!("{}", serde_json::to_string_pretty(&solve_cga(&instance)?)?);
        }
        Command::Sweep {
            config,
            out,
            trials,
            seed,
            no_timing,
        } => {
            let mut spec: SweepSpec = read_json(&config)?;
            if let Some(t) = trials {
                spec.trials = t;
            }
            if let Some(s) = seed {
                spec.seed = s;
            }
            if no_timing {
                spec.record_timing = false;
            }
            let report = run_sweep(&spec)?;
            fs::write(&out, emit_csv(&report.rows)?).with_context(|| format!("writing {}", out.display()))?;
            print!("{}", emit_table(&report.rows));
            if !report.dropped.is_empty() {
                eprintln!("{} trials dropped", report.dropped.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = ErrorRecord {
                error: e.to_string(),
                causes: e.chain().skip(1).map(|c| c.to_string()).collect(),
            };
            eprintln!("{}", serde_json::to_string(&record).unwrap_or_else(|_| e.to_string()));
            ExitCode::FAILURE
        }
    }
}
