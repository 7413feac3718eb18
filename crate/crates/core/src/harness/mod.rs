//! Configuration, random streams, the simulation loop, event log, replay and batches.

pub mod batch;
pub mod config;
pub mod event;
pub mod output;
pub mod replay;
pub mod rng;
pub mod sim;

pub use batch::{
    batch, batch_sequential, resolve_seeds, summary_csv, BatchOutput, RunSummary, SeedSpec,
};
pub use config::{ControllerKind, ExperimentConfig};
pub use event::{Event, EventKind, EventLog, EventRecord};
pub use replay::{metrics_from_log, replay, verify_log};
pub use sim::{run_experiment, RunOutput, Simulation};
