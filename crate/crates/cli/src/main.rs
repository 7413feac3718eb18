use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use predprey_core::harness::output::{write_batch, write_run, METRICS_FILE};
use predprey_core::harness::{
    batch, metrics_from_log, replay, resolve_seeds, run_experiment, EventLog, ExperimentConfig,
    SeedSpec,
};
use predprey_core::metrics::MetricsSeries;
use predprey_core::{Result, SimError};

#[derive(Parser)]
#[command(
    name = "predprey",
    version,
    about = "Predator-prey evolution simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Physics step in seconds, replacing the config value.
    #[arg(long, global = true)]
    tick: Option<f64>,
    /// Experiment length in seconds, replacing the config value.
    #[arg(long, global = true)]
    duration: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its event log and metrics.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Recompute metrics from a log, checking it against a config.
    Replay {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print metrics computed from a log.
    Metrics {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several seeds and write per-run files plus summary.csv.
    Batch {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        runs: usize,
        /// Comma-separated seeds, or `auto` for config seed, +1, +2, ...
        #[arg(long, default_value = "auto")]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn load_config(path: &Path, o: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(t) = o.tick {
        cfg.tick = t;
    }
    if let Some(d) = o.duration {
        cfg.duration = d;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(series: &MetricsSeries, out: Option<&Path>) -> Result<()> {
    let csv = series.to_csv();
    match out {
        Some(p) => std::fs::write(p, csv).map_err(|e| SimError::io(p, e)),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run {
            config,
            seed,
            out,
            overrides,
        } => {
            let cfg = ExperimentConfig {
                seed,
                ..load_config(&config, &overrides)?
            };
            let run = run_experiment(&cfg)?;
            let (events, metrics) = write_run(&out, "", &run)?;
            eprintln!("wrote {} and {}", events.display(), metrics.display());
        }
        Command::Replay {
            log,
            config,
            out,
            overrides,
        } => {
            let cfg = load_config(&config, &overrides)?;
            let log = EventLog::load(&log)?;
            emit(&replay(&log, &cfg)?, out.as_deref())?;
        }
        Command::Metrics { log, out } => {
            let log = EventLog::load(&log)?;
            emit(&metrics_from_log(&log)?, out.as_deref())?;
        }
        Command::Batch {
            config,
            runs,
            seeds,
            out,
            overrides,
        } => {
            let cfg = load_config(&config, &overrides)?;
            let spec: SeedSpec = seeds.parse()?;
            let seeds = resolve_seeds(cfg.seed, runs, &spec)?;
            let b = batch(&cfg, &seeds)?;
            let summary = write_batch(&out, &b)?;
            eprintln!(
                "{} runs; per-run *.{METRICS_FILE} and {} written",
                b.runs.len(),
                summary.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
