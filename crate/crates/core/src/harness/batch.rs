//! Repeated independent runs and their summary table.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::cognition::Origin;
use crate::error::{Result, SimError};
use crate::harness::config::ExperimentConfig;
use crate::harness::sim::{run_experiment, RunOutput};
use crate::lifecycle::Species;
use crate::metrics::{
    attribution, random_symmetry_baseline, AttributionCounters, MetricsSeries, OriginGroup,
};
use crate::parallel;

/// Pairs drawn for the symmetry baseline reported next to every batch.
pub const BASELINE_PAIRS: usize = 100_000;

/// Running sum for exact pooling across runs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accum {
    pub sum: f64,
    pub n: u64,
}

impl Accum {
    pub fn add(&mut self, v: f64) {
        self.sum += v;
        self.n += 1;
    }

    pub fn merge(&mut self, o: &Accum) {
        self.sum += o.sum;
        self.n += o.n;
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

fn species_idx(s: Species) -> usize {
    match s {
        Species::Prey => 0,
        Species::Predator => 1,
    }
}

fn origin_idx(o: Origin) -> usize {
    match o {
        Origin::Random => 0,
        Origin::Inherited => 1,
    }
}

/// Whole-run aggregates of one run, or of several pooled together.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub attribution: AttributionCounters,
    /// `[species][origin]` over all velocity windows.
    pub velocity: [[Accum; 2]; 2],
    /// Same, restricted to windows starting in the second half of the run.
    pub velocity_late: [[Accum; 2]; 2],
    /// Per species, all origins.
    pub wall: [Accum; 2],
    pub symmetry: Accum,
}

impl RunSummary {
    pub fn from_series(s: &MetricsSeries) -> Self {
        let mut out = Self {
            attribution: s.attribution,
            ..Default::default()
        };
        let half = s.horizon / 2.0;
        for v in &s.raw.velocity {
            let (i, j) = (species_idx(v.species), origin_idx(v.origin));
            out.velocity[i][j].add(v.v);
            if v.t >= half {
                out.velocity_late[i][j].add(v.v);
            }
        }
        for w in s.raw.wall.iter().filter(|w| w.origin == OriginGroup::All) {
            out.wall[species_idx(w.species)].add(w.ratio);
        }
        for t in &s.raw.symmetry {
            out.symmetry.add(t.symmetry);
        }
        out
    }

    pub fn merge(&mut self, o: &RunSummary) {
        self.attribution.merge(&o.attribution);
        for i in 0..2 {
            for j in 0..2 {
                self.velocity[i][j].merge(&o.velocity[i][j]);
                self.velocity_late[i][j].merge(&o.velocity_late[i][j]);
            }
            self.wall[i].merge(&o.wall[i]);
        }
        self.symmetry.merge(&o.symmetry);
    }

    pub fn prey_attribution(&self) -> Option<f64> {
        attribution(&self.attribution).0
    }

    pub fn predator_attribution(&self) -> Option<f64> {
        attribution(&self.attribution).1
    }

    pub fn mean_velocity(&self, s: Species, o: Origin) -> Option<f64> {
        self.velocity[species_idx(s)][origin_idx(o)].mean()
    }

    pub fn mean_velocity_late(&self, s: Species, o: Origin) -> Option<f64> {
        self.velocity_late[species_idx(s)][origin_idx(o)].mean()
    }

    pub fn mean_wall_ratio(&self, s: Species) -> Option<f64> {
        self.wall[species_idx(s)].mean()
    }

    pub fn mean_symmetry(&self) -> Option<f64> {
        self.symmetry.mean()
    }
}

#[derive(Debug, Clone)]
pub struct BatchOutput {
    pub seeds: Vec<u64>,
    pub runs: Vec<RunOutput>,
    pub summaries: Vec<RunSummary>,
    pub pooled: RunSummary,
    pub symmetry_baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedSpec {
    /// `base, base + 1, ...` from the config seed.
    Auto,
    List(Vec<u64>),
}

impl std::str::FromStr for SeedSpec {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "auto" {
            return Ok(SeedSpec::Auto);
        }
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|e| SimError::InvalidBatch(format!("bad seed {x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(SeedSpec::List)
    }
}

pub fn resolve_seeds(base: u64, n_runs: usize, spec: &SeedSpec) -> Result<Vec<u64>> {
    if n_runs == 0 {
        return Err(SimError::InvalidBatch("need at least one run".into()));
    }
    let seeds: Vec<u64> = match spec {
        SeedSpec::Auto => (0..n_runs as u64).map(|i| base.wrapping_add(i)).collect(),
        SeedSpec::List(list) => {
            if list.len() != n_runs {
                return Err(SimError::InvalidBatch(format!(
                    "{n_runs} runs requested but {} seeds given",
                    list.len()
                )));
            }
            list.clone()
        }
    };
    let mut seen = HashSet::new();
    if let Some(dup) = seeds.iter().find(|s| !seen.insert(**s)) {
        return Err(SimError::InvalidBatch(format!("duplicate seed {dup}")));
    }
    Ok(seeds)
}

fn assemble(
    config: &ExperimentConfig,
    seeds: &[u64],
    runs: Vec<Result<RunOutput>>,
) -> Result<BatchOutput> {
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let summaries: Vec<RunSummary> = runs
        .iter()
        .map(|r| RunSummary::from_series(&r.series))
        .collect();
    let mut pooled = RunSummary::default();
    for s in &summaries {
        pooled.merge(s);
    }
    Ok(BatchOutput {
        seeds: seeds.to_vec(),
        runs,
        summaries,
        pooled,
        symmetry_baseline: random_symmetry_baseline(BASELINE_PAIRS, config.seed),
    })
}

fn check_batch(config: &ExperimentConfig, seeds: &[u64]) -> Result<()> {
    config.validate()?;
    resolve_seeds(0, seeds.len(), &SeedSpec::List(seeds.to_vec()))?;
    Ok(())
}

fn seeded(config: &ExperimentConfig, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        seed,
        ..config.clone()
    }
}

/// Runs one experiment per seed, concurrently when the `parallel` feature is on.
pub fn batch(config: &ExperimentConfig, seeds: &[u64]) -> Result<BatchOutput> {
    check_batch(config, seeds)?;
    let runs = parallel::map(seeds, |&s| run_experiment(&seeded(config, s)));
    assemble(config, seeds, runs)
}

pub fn batch_sequential(config: &ExperimentConfig, seeds: &[u64]) -> Result<BatchOutput> {
    check_batch(config, seeds)?;
    let runs = parallel::map_sequential(seeds, |&s| run_experiment(&seeded(config, s)));
    assemble(config, seeds, runs)
}

pub const SUMMARY_HEADER: &str = "run,seed,prey_attribution,predator_attribution,\
velocity_prey_random,velocity_prey_inherited,velocity_predator_random,velocity_predator_inherited,\
wall_ratio_prey,wall_ratio_predator,tag_symmetry,symmetry_baseline";

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn summary_row(out: &mut String, run: &str, seed: &str, s: &RunSummary, baseline: f64) {
    let _ = writeln!(
        out,
        "{run},{seed},{},{},{},{},{},{},{},{},{},{baseline}",
        cell(s.prey_attribution()),
        cell(s.predator_attribution()),
        cell(s.mean_velocity(Species::Prey, Origin::Random)),
        cell(s.mean_velocity(Species::Prey, Origin::Inherited)),
        cell(s.mean_velocity(Species::Predator, Origin::Random)),
        cell(s.mean_velocity(Species::Predator, Origin::Inherited)),
        cell(s.mean_wall_ratio(Species::Prey)),
        cell(s.mean_wall_ratio(Species::Predator)),
        cell(s.mean_symmetry()),
    );
}

/// One row per run followed by a `pooled` row.
pub fn summary_csv(b: &BatchOutput) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for (i, (seed, s)) in b.seeds.iter().zip(&b.summaries).enumerate() {
        summary_row(
            &mut out,
            &i.to_string(),
            &seed.to_string(),
            s,
            b.symmetry_baseline,
        );
    }
    summary_row(&mut out, "pooled", "", &b.pooled, b.symmetry_baseline);
    out
}
