//! Birth and death. Bodies are never created or destroyed: every death is
//! followed at once by a birth into the same body, possibly of the other species.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cognition::{
    mutate, random_genotype, BrainGenotype, ControlDecision, Origin, Tag, TagState, TARGET_ANGLE,
};
use crate::harness::config::{ExperimentConfig, SPECIES_FLOOR};
use crate::harness::event::{
    BirthCause, BirthPayload, CatchPayload, DeathCause, DeathPayload, Event, EventLog,
    GenotypeRecord, GuardPayload, GuardReason, ParentRef, SacrificePayload,
};
use crate::harness::rng::RngStreams;
use crate::locomotion::GaitOscillator;
use crate::world::{
    nearest_observable_adversary, AgentId, Arena, Point, Pose, WorldState, BODY_COUNT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Prey,
    Predator,
}

impl Species {
    pub fn as_str(self) -> &'static str {
        match self {
            Species::Prey => "prey",
            Species::Predator => "predator",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: AgentId,
    pub species: Species,
    pub pose: Pose,
    pub brain: BrainGenotype,
    /// Unique per controller over the whole run; a new one is issued at every birth.
    pub controller: u64,
    pub tag_state: TagState,
    /// Time of birth or of the last catch; hunger counts from here.
    pub fed_at: f64,
    /// Spawn protection flag. Predators are always active.
    pub active: bool,
    pub birth_time: f64,
    /// Gait belongs to the body and survives controller turnover.
    pub gait: GaitOscillator,
    /// Last brain output, held between control steps.
    pub decision: ControlDecision,
}

impl Agent {
    pub fn hunger(&self, now: f64) -> f64 {
        now - self.fed_at
    }

    pub fn origin(&self) -> Origin {
        self.brain.origin
    }

    fn parent_ref(&self) -> ParentRef {
        ParentRef {
            agent: self.id,
            controller: self.controller,
        }
    }
}

/// Seconds between predator death procedures for `predators` living predators.
pub fn death_interval(predators: usize) -> f64 {
    25.0 - predators as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeathSchedule {
    pub last_procedure_time: f64,
    pub interval: f64,
    pub next_death_time: f64,
}

impl DeathSchedule {
    pub fn start(predators: usize) -> Self {
        let mut s = Self {
            last_procedure_time: 0.0,
            interval: 0.0,
            next_death_time: 0.0,
        };
        s.recompute(predators);
        s
    }

    /// Updates the interval for a new predator count, measured from the last procedure.
    pub fn recompute(&mut self, predators: usize) {
        self.interval = death_interval(predators);
        self.next_death_time = self.last_procedure_time + self.interval;
    }

    fn procedure_done(&mut self, now: f64, predators: usize) {
        self.last_procedure_time = now;
        self.recompute(predators);
    }

    pub fn is_due(&self, now: f64) -> bool {
        now >= self.next_death_time
    }
}

/// Details of a catch that went through, for online attribution bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatchOutcome {
    pub predator_controller: u64,
    pub predator_origin: Origin,
    pub prey_origin: Origin,
}

fn genotype_record(b: &BrainGenotype) -> GenotypeRecord {
    GenotypeRecord {
        topology: b.topology,
        weights: b.weights.clone(),
    }
}

/// Random controller with probability `random_birth_prob`, otherwise a mutated
/// copy of `parent`. Returns the genotype and whether the parent was used.
fn offspring(
    parent: &BrainGenotype,
    cfg: &ExperimentConfig,
    rng: &mut RngStreams,
) -> (BrainGenotype, bool) {
    if rng.reproduction.random_bool(cfg.random_birth_prob) {
        (random_genotype(cfg.hidden_units, &mut rng.genesis), false)
    } else {
        (mutate(parent, cfg.mutation_sigma, &mut rng.mutation), true)
    }
}

/// Installs a new controller into `body`, keeping pose, gait, tag state and held decision.
fn give_birth(
    world: &mut WorldState,
    log: &mut EventLog,
    body: AgentId,
    species: Species,
    brain: BrainGenotype,
    parent: Option<ParentRef>,
    cause: BirthCause,
) {
    let now = world.clock;
    let controller = world.allocate_controller();
    let a = world.agent_mut(body);
    a.species = species;
    a.brain = brain;
    a.controller = controller;
    a.fed_at = now;
    a.birth_time = now;
    a.active = species == Species::Predator;
    let payload = BirthPayload {
        controller,
        species,
        origin: a.brain.origin,
        cause,
        parent: if a.brain.origin == Origin::Inherited {
            parent
        } else {
            None
        },
        position: a.pose.position,
        heading: a.pose.heading,
        genotype: genotype_record(&a.brain),
    };
    log.push(now, Some(body), Event::Birth(payload));
}

fn record_death(world: &WorldState, log: &mut EventLog, body: AgentId, cause: DeathCause) {
    let a = world.agent(body);
    log.push(
        world.clock,
        Some(body),
        Event::Death(DeathPayload {
            controller: a.controller,
            species: a.species,
            origin: a.origin(),
            cause,
        }),
    );
}

/// Builds the initial population. Agent ids `0..initial_prey` are prey, the rest predators.
pub fn init_population(cfg: &ExperimentConfig, log: &mut EventLog) -> WorldState {
    let mut rng = RngStreams::new(cfg.seed);
    let arena = Arena::new(cfg.arena_side, cfg.wall_threshold);
    let mut agents = Vec::with_capacity(BODY_COUNT);
    for i in 0..BODY_COUNT {
        let species = if i < cfg.initial_prey {
            Species::Prey
        } else {
            Species::Predator
        };
        let r = &mut rng.init;
        let position = Point::new(
            r.random_range(0.0..=cfg.arena_side),
            r.random_range(0.0..=cfg.arena_side),
        );
        // uniform on (-pi, pi]
        let heading = PI - r.random_range(0.0..2.0 * PI);
        let tag = if r.random_bool(0.5) {
            Tag::Positive
        } else {
            Tag::Negative
        };
        let gait = GaitOscillator::new(
            r.random_range(0.0..2.0 * PI),
            cfg.oscillator_frequency,
            cfg.oscillator_amplitude,
        );
        let brain = random_genotype(cfg.hidden_units, r);
        agents.push(Agent {
            id: AgentId(i as u32),
            species,
            pose: Pose::new(position, heading),
            brain,
            controller: i as u64,
            tag_state: TagState::new(tag),
            fed_at: 0.0,
            active: species == Species::Predator,
            birth_time: 0.0,
            gait,
            decision: ControlDecision {
                target_angle: TARGET_ANGLE,
                desired_tag: tag,
            },
        });
    }
    let world = WorldState {
        arena,
        clock: 0.0,
        schedule: DeathSchedule::start(cfg.initial_predators),
        agents,
        rng,
        next_controller: BODY_COUNT as u64,
    };
    for a in &world.agents {
        log.push(
            0.0,
            Some(a.id),
            Event::Birth(BirthPayload {
                controller: a.controller,
                species: a.species,
                origin: a.origin(),
                cause: BirthCause::Initial,
                parent: None,
                position: a.pose.position,
                heading: a.pose.heading,
                genotype: genotype_record(&a.brain),
            }),
        );
    }
    world
}

/// Every active prey within `catch_radius` of some predator, regardless of tag,
/// paired with its nearest predator (ties to the lowest id).
pub fn check_catches(world: &WorldState, catch_radius: f64) -> Vec<(AgentId, AgentId)> {
    let predators: Vec<&Agent> = world
        .agents
        .iter()
        .filter(|a| a.species == Species::Predator)
        .collect();
    world
        .agents
        .iter()
        .filter(|a| a.species == Species::Prey && a.active)
        .filter_map(|prey| {
            predators
                .iter()
                .map(|p| (p.pose.position.distance(prey.pose.position), p.id))
                .filter(|(d, _)| *d <= catch_radius)
                .fold(None, |best: Option<(f64, AgentId)>, c| match best {
                    Some(b) if b.0 <= c.0 => Some(b),
                    _ => Some(c),
                })
                .map(|(_, pred)| (pred, prey.id))
        })
        .collect()
}

/// The prey dies and an offspring of the predator takes over its body.
/// Returns `None` when the catch is suppressed by the prey floor.
pub fn handle_catch(
    world: &mut WorldState,
    cfg: &ExperimentConfig,
    log: &mut EventLog,
    predator: AgentId,
    prey: AgentId,
) -> Option<CatchOutcome> {
    let now = world.clock;
    if world.prey_count() <= SPECIES_FLOOR {
        log.push(
            now,
            Some(prey),
            Event::Guard(GuardPayload {
                reason: GuardReason::PreyFloor,
                other: Some(predator),
            }),
        );
        return None;
    }
    let (hunter, victim) = (world.agent(predator).clone(), world.agent(prey).clone());
    debug_assert_eq!(hunter.species, Species::Predator);
    debug_assert_eq!(victim.species, Species::Prey);
    log.push(
        now,
        Some(prey),
        Event::Catch(CatchPayload {
            predator,
            predator_controller: hunter.controller,
            predator_origin: hunter.origin(),
            prey_controller: victim.controller,
            prey_origin: victim.origin(),
        }),
    );
    record_death(world, log, prey, DeathCause::Caught);
    let (child, _) = offspring(&hunter.brain, cfg, &mut world.rng);
    give_birth(
        world,
        log,
        prey,
        Species::Predator,
        child,
        Some(hunter.parent_ref()),
        BirthCause::Catch,
    );
    world.agent_mut(predator).fed_at = now;
    let p = world.predator_count();
    world.schedule.recompute(p);
    Some(CatchOutcome {
        predator_controller: hunter.controller,
        predator_origin: hunter.origin(),
        prey_origin: victim.origin(),
    })
}

/// Whether a predator is close enough to an observable prey to be spared.
pub fn is_exempt(world: &WorldState, predator: AgentId, exemption_distance: f64) -> bool {
    nearest_observable_adversary(predator, world).is_some_and(|prey| {
        let d = world
            .agent(predator)
            .pose
            .position
            .distance(world.agent(prey).pose.position);
        d <= exemption_distance
    })
}

/// Predators ordered for the death procedure: hungriest first, ties to the lowest id.
pub fn death_candidates(world: &WorldState) -> Vec<AgentId> {
    let now = world.clock;
    let mut preds: Vec<&Agent> = world
        .agents
        .iter()
        .filter(|a| a.species == Species::Predator)
        .collect();
    preds.sort_by(|a, b| {
        b.hunger(now)
            .total_cmp(&a.hunger(now))
            .then(a.id.cmp(&b.id))
    });
    preds.into_iter().map(|a| a.id).collect()
}

/// Kills the hungriest non-exempt predator and hands its body to a prey.
/// Returns the body that died, if any.
pub fn predator_death_procedure(
    world: &mut WorldState,
    cfg: &ExperimentConfig,
    log: &mut EventLog,
) -> Option<AgentId> {
    let now = world.clock;
    let predators = world.predator_count();
    if predators <= SPECIES_FLOOR {
        log.push(
            now,
            None,
            Event::Guard(GuardPayload {
                reason: GuardReason::PredatorFloor,
                other: None,
            }),
        );
        world.schedule.procedure_done(now, predators);
        return None;
    }
    let victim = death_candidates(world)
        .into_iter()
        .find(|&id| !is_exempt(world, id, cfg.exemption_distance));
    let Some(victim) = victim else {
        log.push(
            now,
            None,
            Event::Guard(GuardPayload {
                reason: GuardReason::AllExempt,
                other: None,
            }),
        );
        world.schedule.procedure_done(now, predators);
        return None;
    };

    record_death(world, log, victim, DeathCause::Hunger);
    let here = world.agent(victim).pose.position;
    let parent = world
        .agents
        .iter()
        .filter(|a| a.species == Species::Prey)
        .map(|a| (a.pose.position.distance(here), a.id))
        .filter(|(d, _)| *d <= cfg.prey_repro_distance)
        .fold(None, |best: Option<(f64, AgentId)>, c| match best {
            Some(b) if b.0 <= c.0 => Some(b),
            _ => Some(c),
        })
        .map(|(_, id)| world.agent(id).clone());
    match parent {
        Some(parent) => {
            let (child, _) = offspring(&parent.brain, cfg, &mut world.rng);
            give_birth(
                world,
                log,
                victim,
                Species::Prey,
                child,
                Some(parent.parent_ref()),
                BirthCause::PreyReproduction,
            );
        }
        None => {
            let child = random_genotype(cfg.hidden_units, &mut world.rng.genesis);
            give_birth(
                world,
                log,
                victim,
                Species::Prey,
                child,
                None,
                BirthCause::Refill,
            );
        }
    }
    let p = world.predator_count();
    world.schedule.procedure_done(now, p);
    Some(victim)
}

pub fn sacrifice_needed(world: &WorldState) -> bool {
    world.predator_count() < SPECIES_FLOOR && world.prey_count() > SPECIES_FLOOR
}

/// A uniformly random active prey (any prey if none is active) becomes a predator.
pub fn prey_sacrifice(
    world: &mut WorldState,
    cfg: &ExperimentConfig,
    log: &mut EventLog,
) -> Option<AgentId> {
    if !sacrifice_needed(world) {
        return None;
    }
    let prey_ids = |active_only: bool| -> Vec<AgentId> {
        world
            .agents
            .iter()
            .filter(|a| a.species == Species::Prey && (a.active || !active_only))
            .map(|a| a.id)
            .collect()
    };
    let mut pool = prey_ids(true);
    if pool.is_empty() {
        pool = prey_ids(false);
    }
    let victim = pool[world.rng.sacrifice.random_range(0..pool.len())];
    let predators: Vec<AgentId> = world
        .agents
        .iter()
        .filter(|a| a.species == Species::Predator)
        .map(|a| a.id)
        .collect();
    let pick = world.rng.sacrifice.random_range(0..predators.len());
    let parent = world.agent(predators[pick]).clone();

    let v = world.agent(victim);
    log.push(
        world.clock,
        Some(victim),
        Event::Sacrifice(SacrificePayload {
            controller: v.controller,
            origin: v.origin(),
        }),
    );
    record_death(world, log, victim, DeathCause::Sacrificed);
    let (child, _) = offspring(&parent.brain, cfg, &mut world.rng);
    give_birth(
        world,
        log,
        victim,
        Species::Predator,
        child,
        Some(parent.parent_ref()),
        BirthCause::Sacrifice,
    );
    let p = world.predator_count();
    world.schedule.recompute(p);
    Some(victim)
}

/// Activates every inactive prey that is at least `safe_distance` from all predators.
pub fn update_spawn_protection(world: &mut WorldState, safe_distance: f64) {
    let predator_positions: Vec<Point> = world
        .agents
        .iter()
        .filter(|a| a.species == Species::Predator)
        .map(|a| a.pose.position)
        .collect();
    for a in world.agents.iter_mut() {
        if a.species == Species::Prey
            && !a.active
            && predator_positions
                .iter()
                .all(|p| p.distance(a.pose.position) >= safe_distance)
        {
            a.active = true;
        }
    }
}
