//! The main loop.
//!
//! Per tick, in this fixed order:
//! 1. kinematics for every body
//! 2. on control steps: sense, forward, decide, apply tag (all agents see the same state)
//! 3. catches
//! 4. prey sacrifice if predators are below the floor
//! 5. predator death procedure if due
//! 6. spawn protection
//! 7. on control steps: world sample
//!
//! Changing this order changes every log, so treat it as part of the format.

use rand::Rng;

use crate::cognition::{apply_tag, decide, forward, sense, ControlDecision, Tag};
use crate::error::Result;
use crate::harness::config::{ControllerKind, ExperimentConfig};
use crate::harness::event::{
    AgentSnapshot, EndPayload, Event, EventLog, HeaderPayload, SamplePayload, TagSwitchPayload,
    LOG_FORMAT_VERSION,
};
use crate::lifecycle::{
    check_catches, handle_catch, init_population, predator_death_procedure, prey_sacrifice,
    sacrifice_needed, update_spawn_protection,
};
use crate::locomotion::{oscillator_step, step_kinematics, SteeringState};
use crate::metrics::{series_from_log, AttributionCounters, AttributionTracker, MetricsSeries};
use crate::world::{nearest_observable_adversary, Pose, WorldState};

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub log: EventLog,
    pub series: MetricsSeries,
    /// Attribution counters maintained while simulating, independent of the log.
    pub online_attribution: AttributionCounters,
}

pub struct Simulation<'a> {
    cfg: &'a ExperimentConfig,
    pub world: WorldState,
    pub log: EventLog,
    tracker: AttributionTracker,
}

impl<'a> Simulation<'a> {
    /// Writes the header and initial births. The config must already be validated.
    pub fn new(cfg: &'a ExperimentConfig) -> Self {
        let mut log = EventLog::new();
        log.push(
            0.0,
            None,
            Event::Header(HeaderPayload {
                format: LOG_FORMAT_VERSION,
                model_hash: cfg.model_hash(),
                config: cfg.clone(),
            }),
        );
        let world = init_population(cfg, &mut log);
        Self {
            cfg,
            world,
            log,
            tracker: AttributionTracker::default(),
        }
    }

    fn move_all(&mut self) {
        let dt = self.cfg.tick;
        let arena = self.world.arena;
        for a in self.world.agents.iter_mut() {
            let (gait, speed) = oscillator_step(a.gait, dt);
            a.gait = gait;
            let alpha = a.decision.target_angle;
            let steering = SteeringState::new(alpha, self.cfg.track_width);
            let next = step_kinematics(a.pose, alpha, speed, &steering, dt);
            a.pose = Pose {
                position: arena.clamp(next.position),
                heading: next.heading,
            };
        }
    }

    fn coin_flip(&mut self) -> ControlDecision {
        let r = &mut self.world.rng.cognition;
        let angle = if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let tag = if r.random_bool(0.5) { 1.0 } else { -1.0 };
        decide(angle, tag)
    }

    fn control_step(&mut self) {
        let decisions: Vec<ControlDecision> = match self.cfg.controller {
            ControllerKind::Neural => self
                .world
                .agents
                .iter()
                .map(|a| {
                    let inputs = sense(a.id, &self.world);
                    let (raw_angle, raw_tag) = forward(&a.brain, &inputs);
                    decide(raw_angle, raw_tag)
                })
                .collect(),
            ControllerKind::CoinFlip => (0..self.world.agents.len())
                .map(|_| self.coin_flip())
                .collect(),
        };
        let now = self.world.clock;
        for (a, d) in self.world.agents.iter_mut().zip(decisions) {
            a.decision = d;
            let before: Tag = a.tag_state.tag;
            a.tag_state = apply_tag(a.tag_state, d.desired_tag, now, self.cfg.tag_cooldown);
            if a.tag_state.tag != before {
                self.log.push(
                    now,
                    Some(a.id),
                    Event::TagSwitch(TagSwitchPayload {
                        controller: a.controller,
                        from: before,
                        to: a.tag_state.tag,
                    }),
                );
            }
        }
    }

    fn lifecycle_step(&mut self) {
        for (predator, prey) in check_catches(&self.world, self.cfg.catch_radius) {
            if let Some(outcome) =
                handle_catch(&mut self.world, self.cfg, &mut self.log, predator, prey)
            {
                self.tracker.record(&outcome);
            }
        }
        if sacrifice_needed(&self.world) {
            prey_sacrifice(&mut self.world, self.cfg, &mut self.log);
        }
        if self.world.schedule.is_due(self.world.clock) {
            predator_death_procedure(&mut self.world, self.cfg, &mut self.log);
        }
        update_spawn_protection(&mut self.world, self.cfg.spawn_safe_distance);
    }

    fn sample(&mut self) {
        let w = &self.world;
        let agents = w
            .agents
            .iter()
            .map(|a| AgentSnapshot {
                id: a.id,
                species: a.species,
                origin: a.origin(),
                controller: a.controller,
                position: a.pose.position,
                heading: a.pose.heading,
                tag: a.tag_state.tag,
                active: a.active,
                adversary: nearest_observable_adversary(a.id, w),
            })
            .collect();
        self.log
            .push(w.clock, None, Event::Sample(SamplePayload { agents }));
    }

    /// Runs one tick. Tick 0 skips movement and only establishes the first decisions.
    pub fn step(&mut self, tick: u64) {
        let control = tick.is_multiple_of(self.cfg.ticks_per_control());
        self.world.clock = self.cfg.time_at(tick);
        if tick > 0 {
            self.move_all();
        }
        if control {
            self.control_step();
        }
        self.lifecycle_step();
        if control {
            self.sample();
        }
    }

    pub fn finish(mut self) -> RunOutput {
        let records = self.log.len();
        self.log
            .push(self.world.clock, None, Event::End(EndPayload { records }));
        let series = series_from_log(&self.log.records, self.cfg);
        RunOutput {
            config: self.cfg.clone(),
            log: self.log,
            series,
            online_attribution: self.tracker.counters,
        }
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let mut sim = Simulation::new(config);
    for tick in 0..=config.total_ticks() {
        sim.step(tick);
    }
    Ok(sim.finish())
}
