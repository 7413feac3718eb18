use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    tag_symmetry_of, velocity_sample, wall_ratio_of, AttributionCounters, AttributionTracker,
    TagSymmetrySample,
};
use crate::cognition::Origin;
use crate::harness::config::ExperimentConfig;
use crate::harness::event::{Event, EventRecord, SamplePayload};
use crate::lifecycle::{CatchOutcome, Species};
use crate::world::{AgentId, Arena};

pub const CSV_HEADER: &str = "t,metric,species,origin,value";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Attribution,
    Velocity,
    WallRatio,
    TagSymmetry,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Attribution => "attribution",
            Metric::Velocity => "velocity",
            Metric::WallRatio => "wall_ratio",
            Metric::TagSymmetry => "tag_symmetry",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeciesGroup {
    Prey,
    Predator,
    Both,
}

impl SpeciesGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            SpeciesGroup::Prey => "prey",
            SpeciesGroup::Predator => "predator",
            SpeciesGroup::Both => "both",
        }
    }
}

impl From<Species> for SpeciesGroup {
    fn from(s: Species) -> Self {
        match s {
            Species::Prey => SpeciesGroup::Prey,
            Species::Predator => SpeciesGroup::Predator,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginGroup {
    Random,
    Inherited,
    All,
}

impl OriginGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            OriginGroup::Random => "random",
            OriginGroup::Inherited => "inherited",
            OriginGroup::All => "all",
        }
    }

    pub fn admits(self, o: Origin) -> bool {
        match self {
            OriginGroup::All => true,
            OriginGroup::Random => o == Origin::Random,
            OriginGroup::Inherited => o == Origin::Inherited,
        }
    }
}

impl From<Origin> for OriginGroup {
    fn from(o: Origin) -> Self {
        match o {
            Origin::Random => OriginGroup::Random,
            Origin::Inherited => OriginGroup::Inherited,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocitySample {
    pub agent: AgentId,
    pub species: Species,
    pub origin: Origin,
    /// Positive = toward the adversary.
    pub v: f64,
    /// Window start.
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallSample {
    pub t: f64,
    pub species: Species,
    pub origin: OriginGroup,
    pub ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawSamples {
    pub velocity: Vec<VelocitySample>,
    pub wall: Vec<WallSample>,
    pub symmetry: Vec<TagSymmetrySample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    /// Bucket start.
    pub t: f64,
    pub metric: Metric,
    pub species: SpeciesGroup,
    pub origin: OriginGroup,
    /// `None` when the bucket had no samples.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSeries {
    pub bucket: f64,
    pub horizon: f64,
    pub points: Vec<SeriesPoint>,
    pub raw: RawSamples,
    pub attribution: AttributionCounters,
}

impl MetricsSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.points.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = write!(
                out,
                "{},{},{},{},",
                p.t,
                p.metric.as_str(),
                p.species.as_str(),
                p.origin.as_str()
            );
            if let Some(v) = p.value {
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn group(
        &self,
        metric: Metric,
        species: SpeciesGroup,
        origin: OriginGroup,
    ) -> impl Iterator<Item = &SeriesPoint> + '_ {
        self.points
            .iter()
            .filter(move |p| p.metric == metric && p.species == species && p.origin == origin)
    }
}

pub fn bucket_count(bucket: f64, horizon: f64) -> usize {
    ((horizon / bucket) - 1e-9).ceil().max(1.0) as usize
}

fn bucket_index(t: f64, bucket: f64) -> usize {
    ((t / bucket) + 1e-9).floor() as usize
}

/// Means of `(t, value)` samples over consecutive buckets covering [0, horizon).
/// Samples at or beyond the horizon are dropped; empty buckets are `None`.
pub fn bucket_series(
    samples: impl IntoIterator<Item = (f64, f64)>,
    bucket: f64,
    horizon: f64,
) -> Vec<Option<f64>> {
    assert!(bucket > 0.0, "bucket width must be positive");
    let n = bucket_count(bucket, horizon);
    let mut acc = vec![(0.0f64, 0usize); n];
    for (t, v) in samples {
        let b = bucket_index(t, bucket);
        if t >= 0.0 && b < n {
            acc[b].0 += v;
            acc[b].1 += 1;
        }
    }
    acc.into_iter()
        .map(|(s, k)| (k > 0).then(|| s / k as f64))
        .collect()
}

const SPECIES: [Species; 2] = [Species::Prey, Species::Predator];

fn velocity_samples(
    snapshots: &[(f64, &SamplePayload)],
    window_steps: usize,
) -> Vec<VelocitySample> {
    let mut out = Vec::new();
    for (i, (t, start)) in snapshots.iter().enumerate() {
        let Some((_, end)) = snapshots.get(i + window_steps) else {
            break;
        };
        for a in &start.agents {
            let Some(adv) = a.adversary else { continue };
            let b = &end.agents[a.id.index()];
            if b.controller != a.controller {
                continue;
            }
            let a1 = start.agents[adv.index()].position;
            out.push(VelocitySample {
                agent: a.id,
                species: a.species,
                origin: a.origin,
                v: velocity_sample(a.position, a1, b.position),
                t: *t,
            });
        }
    }
    out
}

fn wall_samples(arena: &Arena, snapshots: &[(f64, &SamplePayload)]) -> Vec<WallSample> {
    let mut out = Vec::new();
    for (t, s) in snapshots {
        for species in SPECIES {
            for origin in [
                OriginGroup::All,
                OriginGroup::Random,
                OriginGroup::Inherited,
            ] {
                let ratio = wall_ratio_of(
                    arena,
                    s.agents
                        .iter()
                        .filter(|a| a.species == species && origin.admits(a.origin))
                        .map(|a| a.position),
                );
                if let Some(ratio) = ratio {
                    out.push(WallSample {
                        t: *t,
                        species,
                        origin,
                        ratio,
                    });
                }
            }
        }
    }
    out
}

/// Recomputes every metric from a log. Assumes the log passed integrity checks.
pub fn series_from_log(records: &[EventRecord], config: &ExperimentConfig) -> MetricsSeries {
    let bucket = config.velocity_bucket;
    let horizon = config.duration;
    let arena = Arena::new(config.arena_side, config.wall_threshold);

    let snapshots: Vec<(f64, &SamplePayload)> = records
        .iter()
        .filter_map(|r| match &r.event {
            Event::Sample(s) => Some((r.t, s)),
            _ => None,
        })
        .collect();
    let raw = RawSamples {
        velocity: velocity_samples(&snapshots, config.window_steps()),
        wall: wall_samples(&arena, &snapshots),
        symmetry: snapshots
            .iter()
            .filter_map(|(t, s)| {
                tag_symmetry_of(s.agents.iter().map(|a| (a.species, a.origin, a.tag)), *t)
            })
            .collect(),
    };

    let mut points = Vec::new();
    let n = bucket_count(bucket, horizon);
    let mut push = |metric, species, origin, values: Vec<Option<f64>>| {
        for (b, value) in values.into_iter().enumerate() {
            points.push(SeriesPoint {
                t: b as f64 * bucket,
                metric,
                species,
                origin,
                value,
            });
        }
    };

    // cumulative attribution at the end of each bucket
    let catches: Vec<(f64, CatchOutcome)> = records
        .iter()
        .filter_map(|r| match &r.event {
            Event::Catch(c) => Some((
                r.t,
                CatchOutcome {
                    predator_controller: c.predator_controller,
                    predator_origin: c.predator_origin,
                    prey_origin: c.prey_origin,
                },
            )),
            _ => None,
        })
        .collect();
    let mut tracker = AttributionTracker::default();
    let mut cumulative = Vec::with_capacity(n);
    let mut next = 0;
    for b in 0..n {
        let last = b + 1 == n;
        while next < catches.len() && (last || bucket_index(catches[next].0, bucket) <= b) {
            tracker.record(&catches[next].1);
            next += 1;
        }
        cumulative.push(super::attribution(&tracker.counters));
    }
    push(
        Metric::Attribution,
        SpeciesGroup::Prey,
        OriginGroup::All,
        cumulative.iter().map(|c| c.0).collect(),
    );
    push(
        Metric::Attribution,
        SpeciesGroup::Predator,
        OriginGroup::All,
        cumulative.iter().map(|c| c.1).collect(),
    );

    for species in SPECIES {
        for origin in [Origin::Random, Origin::Inherited] {
            let values = bucket_series(
                raw.velocity
                    .iter()
                    .filter(|s| s.species == species && s.origin == origin)
                    .map(|s| (s.t, s.v)),
                bucket,
                horizon,
            );
            push(Metric::Velocity, species.into(), origin.into(), values);
        }
    }
    for species in SPECIES {
        for origin in [
            OriginGroup::All,
            OriginGroup::Random,
            OriginGroup::Inherited,
        ] {
            let values = bucket_series(
                raw.wall
                    .iter()
                    .filter(|s| s.species == species && s.origin == origin)
                    .map(|s| (s.t, s.ratio)),
                bucket,
                horizon,
            );
            push(Metric::WallRatio, species.into(), origin, values);
        }
    }
    let values = bucket_series(
        raw.symmetry.iter().map(|s| (s.t, s.symmetry)),
        bucket,
        horizon,
    );
    push(
        Metric::TagSymmetry,
        SpeciesGroup::Both,
        OriginGroup::Inherited,
        values,
    );

    MetricsSeries {
        bucket,
        horizon,
        points,
        raw,
        attribution: tracker.counters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_buckets_for_default_run() {
        let samples = (0..3001).map(|k| (k as f64 * 2.0, 0.5));
        let b = bucket_series(samples, 200.0, 6000.0);
        assert_eq!(b.len(), 30);
        assert!(b.iter().all(|v| *v == Some(0.5)));
    }

    #[test]
    fn singleton_bucket_mean() {
        let b = bucket_series([(250.0, 3.5)], 200.0, 600.0);
        assert_eq!(b, vec![None, Some(3.5), None]);
    }

    #[test]
    fn samples_past_horizon_dropped() {
        let b = bucket_series([(599.9, 1.0), (600.0, 100.0)], 200.0, 600.0);
        assert_eq!(b, vec![None, None, Some(1.0)]);
    }

    #[test]
    fn float_drift_at_bucket_edge() {
        // 2000 * 0.1 lands a hair above or below 200 depending on rounding
        let t = 1999.0 * 0.1 + 0.1;
        assert_eq!(bucket_index(t, 200.0), 1);
    }

    #[test]
    fn csv_leaves_absent_values_empty() {
        let s = MetricsSeries {
            bucket: 200.0,
            horizon: 400.0,
            points: vec![
                SeriesPoint {
                    t: 0.0,
                    metric: Metric::Velocity,
                    species: SpeciesGroup::Prey,
                    origin: OriginGroup::Random,
                    value: Some(-0.25),
                },
                SeriesPoint {
                    t: 200.0,
                    metric: Metric::Velocity,
                    species: SpeciesGroup::Prey,
                    origin: OriginGroup::Random,
                    value: None,
                },
            ],
            raw: RawSamples::default(),
            attribution: AttributionCounters::default(),
        };
        assert_eq!(
            s.to_csv(),
            "t,metric,species,origin,value\n0,velocity,prey,random,-0.25\n200,velocity,prey,random,\n"
        );
    }
}
