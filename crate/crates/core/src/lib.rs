//! Deterministic predator-prey simulator for open-ended evolution experiments.
//!
//! Thirty bodies share a square arena. Prey and predators carry small tanh
//! networks that pick a steering direction and a visibility tag; reproduction
//! is triggered by in-world events (catching prey, standing near a predator
//! when it starves) rather than by a fitness score. Every state change is
//! written to an append-only event log from which all metrics are derived, so
//! a run can be replayed and audited without re-simulating.
//!
//! ```no_run
//! use predprey_core::harness::{run_experiment, ExperimentConfig};
//!
//! let cfg = ExperimentConfig { seed: 7, ..Default::default() };
//! let out = run_experiment(&cfg).unwrap();
//! print!("{}", out.series.to_csv());
//! ```

pub mod cognition;
pub mod error;
pub mod harness;
pub mod lifecycle;
pub mod locomotion;
pub mod metrics;
pub mod parallel;
pub mod world;

#[cfg(test)]
mod test_support;

pub use error::{Result, SimError};
