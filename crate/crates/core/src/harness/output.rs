use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::error::{Result, SimError};
use crate::harness::batch::{summary_csv, BatchOutput};
use crate::harness::sim::RunOutput;

pub const EVENTS_FILE: &str = "events.jsonl";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| SimError::io(path, e))
}

/// Writes `<prefix>events.jsonl` and `<prefix>metrics.csv`; returns both paths.
pub fn write_run(dir: &Path, prefix: &str, run: &RunOutput) -> Result<(PathBuf, PathBuf)> {
    ensure_dir(dir)?;
    let events = dir.join(format!("{prefix}{EVENTS_FILE}"));
    let f = fs::File::create(&events).map_err(|e| SimError::io(&events, e))?;
    run.log
        .write_jsonl(BufWriter::new(f))
        .map_err(|e| SimError::io(&events, e))?;
    let metrics = dir.join(format!("{prefix}{METRICS_FILE}"));
    write_file(&metrics, run.series.to_csv().as_bytes())?;
    Ok((events, metrics))
}

/// Per-run files named `run_<seed>.*` plus `summary.csv`.
pub fn write_batch(dir: &Path, b: &BatchOutput) -> Result<PathBuf> {
    ensure_dir(dir)?;
    for (seed, run) in b.seeds.iter().zip(&b.runs) {
        write_run(dir, &format!("run_{seed}."), run)?;
    }
    let summary = dir.join(SUMMARY_FILE);
    write_file(&summary, summary_csv(b).as_bytes())?;
    Ok(summary)
}
