//! System-dynamics metrics: Attribution, Velocity, wall-sticking ratio and
//! Tag Symmetry, plus the Monte-Carlo symmetry baseline.
//!
//! Everything here is a pure function of world samples or of the event log, so
//! replaying a log reproduces the same numbers bit for bit.

mod series;

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cognition::{Origin, Tag};
use crate::harness::config::VELOCITY_WINDOW;
use crate::harness::rng::stream_rng;
use crate::lifecycle::{CatchOutcome, Species};
use crate::parallel;
use crate::world::{Arena, Point, WorldState};

pub use series::{
    bucket_series, series_from_log, Metric, MetricsSeries, OriginGroup, RawSamples, SeriesPoint,
    SpeciesGroup, VelocitySample, WallSample, CSV_HEADER,
};

/// Fraction of successes expected from chance alone when 2 in 3 births inherit.
pub const ATTRIBUTION_BASELINE: f64 = 2.0 / 3.0;
/// E|u + v| for u, v ~ U(-1, 1).
pub const SYMMETRY_BASELINE: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributionCounters {
    pub prey_caught_inherited: u64,
    pub prey_caught_total: u64,
    pub predators_caught_any_inherited: u64,
    pub predators_caught_any_total: u64,
}

impl AttributionCounters {
    pub fn merge(&mut self, other: &Self) {
        self.prey_caught_inherited += other.prey_caught_inherited;
        self.prey_caught_total += other.prey_caught_total;
        self.predators_caught_any_inherited += other.predators_caught_any_inherited;
        self.predators_caught_any_total += other.predators_caught_any_total;
    }
}

/// Counts catches, remembering which predator controllers already scored.
#[derive(Debug, Clone, Default)]
pub struct AttributionTracker {
    pub counters: AttributionCounters,
    scored: HashSet<u64>,
}

impl AttributionTracker {
    pub fn record(&mut self, c: &CatchOutcome) {
        let k = &mut self.counters;
        k.prey_caught_total += 1;
        if c.prey_origin == Origin::Inherited {
            k.prey_caught_inherited += 1;
        }
        if self.scored.insert(c.predator_controller) {
            k.predators_caught_any_total += 1;
            if c.predator_origin == Origin::Inherited {
                k.predators_caught_any_inherited += 1;
            }
        }
    }
}

/// (prey, predator) attribution. Low is good for prey, high for predators.
/// A zero denominator yields `None`.
pub fn attribution(c: &AttributionCounters) -> (Option<f64>, Option<f64>) {
    let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
    (
        ratio(c.prey_caught_inherited, c.prey_caught_total),
        ratio(
            c.predators_caught_any_inherited,
            c.predators_caught_any_total,
        ),
    )
}

/// Closing speed toward the adversary's position at the window start; positive
/// means the agent got closer.
pub fn velocity_sample(p1: Point, a1: Point, p2: Point) -> f64 {
    (p1.distance(a1) - p2.distance(a1)) / VELOCITY_WINDOW
}

/// Fraction of agents within the wall threshold, or `None` for an empty group.
pub fn wall_ratio_of(arena: &Arena, positions: impl IntoIterator<Item = Point>) -> Option<f64> {
    let (stuck, n) = positions.into_iter().fold((0usize, 0usize), |(s, n), p| {
        (s + usize::from(arena.is_stuck_to_wall(p)), n + 1)
    });
    (n > 0).then(|| stuck as f64 / n as f64)
}

/// (prey, predator) wall-sticking ratios of the current world.
pub fn wall_stuck_ratio(world: &WorldState) -> (f64, f64) {
    let of = |s: Species| {
        wall_ratio_of(
            &world.arena,
            world
                .agents
                .iter()
                .filter(|a| a.species == s)
                .map(|a| a.pose.position),
        )
        .unwrap_or(0.0)
    };
    (of(Species::Prey), of(Species::Predator))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TagSymmetrySample {
    pub prey_tag_avg: f64,
    pub pred_tag_avg: f64,
    pub symmetry: f64,
    pub t: f64,
}

impl TagSymmetrySample {
    pub fn from_averages(prey_tag_avg: f64, pred_tag_avg: f64, t: f64) -> Self {
        Self {
            prey_tag_avg,
            pred_tag_avg,
            symmetry: (prey_tag_avg + pred_tag_avg).abs(),
            t,
        }
    }
}

pub fn mean_tag(tags: impl IntoIterator<Item = Tag>) -> Option<f64> {
    let (sum, n) = tags.into_iter().fold((0i64, 0usize), |(s, n), t| {
        (s + i64::from(t.value()), n + 1)
    });
    (n > 0).then(|| sum as f64 / n as f64)
}

/// Symmetry over inherited-origin agents only; `None` unless both species have one.
pub fn tag_symmetry_of(
    agents: impl IntoIterator<Item = (Species, Origin, Tag)> + Clone,
    t: f64,
) -> Option<TagSymmetrySample> {
    let avg = |s: Species| {
        mean_tag(
            agents
                .clone()
                .into_iter()
                .filter(move |&(sp, o, _)| sp == s && o == Origin::Inherited)
                .map(|(_, _, tag)| tag),
        )
    };
    Some(TagSymmetrySample::from_averages(
        avg(Species::Prey)?,
        avg(Species::Predator)?,
        t,
    ))
}

pub fn tag_symmetry(world: &WorldState) -> Option<TagSymmetrySample> {
    tag_symmetry_of(
        world
            .agents
            .iter()
            .map(|a| (a.species, a.origin(), a.tag_state.tag)),
        world.clock,
    )
}

const BASELINE_CHUNK: usize = 8192;

fn baseline_chunk_sum(seed: u64, chunk: usize, pairs: usize) -> f64 {
    let mut rng = stream_rng(seed, (1u64 << 32) + chunk as u64);
    (0..pairs)
        .map(|_| {
            let u: f64 = rng.random_range(-1.0..1.0);
            let v: f64 = rng.random_range(-1.0..1.0);
            (u + v).abs()
        })
        .sum()
}

fn baseline_chunks(n_pairs: usize) -> Vec<(usize, usize)> {
    (0..n_pairs.div_ceil(BASELINE_CHUNK))
        .map(|c| (c, BASELINE_CHUNK.min(n_pairs - c * BASELINE_CHUNK)))
        .collect()
}

/// Mean of |u + v| over `n_pairs` uniform pairs on [-1, 1]. Chunks are
/// independently seeded and summed in order, so the result does not depend on
/// whether the `parallel` feature is enabled.
pub fn random_symmetry_baseline(n_pairs: usize, seed: u64) -> f64 {
    assert!(n_pairs >= 1, "need at least one pair");
    let sums = parallel::map(&baseline_chunks(n_pairs), |&(c, k)| {
        baseline_chunk_sum(seed, c, k)
    });
    sums.iter().sum::<f64>() / n_pairs as f64
}

/// Single-threaded reference for [`random_symmetry_baseline`].
pub fn random_symmetry_baseline_sequential(n_pairs: usize, seed: u64) -> f64 {
    assert!(n_pairs >= 1, "need at least one pair");
    let sums = parallel::map_sequential(&baseline_chunks(n_pairs), |&(c, k)| {
        baseline_chunk_sum(seed, c, k)
    });
    sums.iter().sum::<f64>() / n_pairs as f64
}
