//! Hand-built worlds for unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cognition::{BrainGenotype, ControlDecision, Tag, TagState};
use crate::harness::config::ExperimentConfig;
use crate::harness::event::EventLog;
use crate::harness::rng::RngStreams;
use crate::lifecycle::{init_population, Agent, DeathSchedule, Species};
use crate::locomotion::GaitOscillator;
use crate::world::{AgentId, Arena, Point, Pose, WorldState};

fn filler(id: u32) -> Agent {
    // inactive prey parked in a corner: invisible to predators, ignored by prey
    Agent {
        id: AgentId(id),
        species: Species::Prey,
        pose: Pose::new(Point::new(0.0, 0.0), 0.0),
        brain: BrainGenotype::zeros(4),
        controller: 1000 + id as u64,
        tag_state: TagState::new(Tag::Positive),
        fed_at: 0.0,
        active: false,
        birth_time: 0.0,
        gait: GaitOscillator::new(0.0, 0.0, 0.0),
        decision: ControlDecision {
            target_angle: 0.7,
            desired_tag: Tag::Positive,
        },
    }
}

pub fn bare_world(side: f64) -> WorldState {
    WorldState {
        arena: Arena::new(side, 1.0),
        clock: 0.0,
        agents: Vec::new(),
        schedule: DeathSchedule::start(14),
        rng: RngStreams::new(0),
        next_controller: 5000,
    }
}

/// Puts agent `id` at `pos` facing +x, growing the world with fillers as needed.
pub fn place(
    w: &mut WorldState,
    id: u32,
    species: Species,
    pos: (f64, f64),
    tag: i8,
    active: bool,
) {
    while w.agents.len() <= id as usize {
        let next = w.agents.len() as u32;
        w.agents.push(filler(next));
    }
    let a = &mut w.agents[id as usize];
    a.species = species;
    a.pose = Pose::new(Point::new(pos.0, pos.1), 0.0);
    a.tag_state = TagState::new(Tag::try_from(tag).unwrap());
    a.active = active || species == Species::Predator;
    a.controller = id as u64;
}

/// A full 30-body world with scrambled tags and activity.
pub fn random_world(seed: u64) -> WorldState {
    let cfg = ExperimentConfig {
        seed,
        ..Default::default()
    };
    let mut w = init_population(&cfg, &mut EventLog::new());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for a in w.agents.iter_mut() {
        a.tag_state = TagState::new(if rng.random_bool(0.5) {
            Tag::Positive
        } else {
            Tag::Negative
        });
        a.active = a.species == Species::Predator || rng.random_bool(0.7);
    }
    w
}
