//! Arena geometry, poses and the spatial queries agents use to find each other.
//!
//! Headings are mathematical angles (counter-clockwise from +x). Bearings
//! returned by [`relative_bearing`] use the robot convention instead: positive
//! means the target is on the observer's right.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::harness::rng::RngStreams;
use crate::lifecycle::{Agent, DeathSchedule, Species};

/// Number of body avatars in every run.
pub const BODY_COUNT: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Square, axis-aligned arena with corners (0,0) and (side, side).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arena {
    pub side_length: f64,
    pub wall_stuck_threshold: f64,
}

impl Arena {
    pub fn new(side_length: f64, wall_stuck_threshold: f64) -> Self {
        assert!(side_length > 0.0, "arena side must be positive");
        Self {
            side_length,
            wall_stuck_threshold,
        }
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(
            p.x.clamp(0.0, self.side_length),
            p.y.clamp(0.0, self.side_length),
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.side_length).contains(&p.x) && (0.0..=self.side_length).contains(&p.y)
    }

    /// Largest possible distance between two points of the arena.
    pub fn diagonal(&self) -> f64 {
        self.side_length * std::f64::consts::SQRT_2
    }

    pub fn is_stuck_to_wall(&self, p: Point) -> bool {
        distance_to_nearest_wall(p, self) <= self.wall_stuck_threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Point,
    /// Radians in (-pi, pi], counter-clockwise from +x.
    pub heading: f64,
}

impl Pose {
    pub fn new(position: Point, heading: f64) -> Self {
        Self {
            position,
            heading: wrap_angle(heading),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for AgentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Signed angle from the observer's heading to `target`. Negative means the
/// target is on the observer's left, positive on its right. Coincident points
/// yield 0.
pub fn relative_bearing(observer: &Pose, target: Point) -> f64 {
    let dx = target.x - observer.position.x;
    let dy = target.y - observer.position.y;
    if dx == 0.0 && dy == 0.0 {
        return 0.0;
    }
    // Counter-clockwise offset, negated so that clockwise (rightward) is positive.
    let ccw = wrap_angle(dy.atan2(dx) - observer.heading);
    if ccw == -PI || ccw == PI {
        PI
    } else {
        -ccw
    }
}

pub fn distance_to_nearest_wall(p: Point, arena: &Arena) -> f64 {
    let s = arena.side_length;
    p.x.min(s - p.x).min(p.y).min(s - p.y).max(0.0)
}

/// Full simulation state for one run.
#[derive(Debug, Clone)]
pub struct WorldState {
    pub arena: Arena,
    pub clock: f64,
    /// Indexed by `AgentId`; always exactly [`BODY_COUNT`] entries.
    pub agents: Vec<Agent>,
    pub schedule: DeathSchedule,
    pub rng: RngStreams,
    pub next_controller: u64,
}

impl WorldState {
    pub fn agent(&self, id: AgentId) -> &Agent {
        &self.agents[id.index()]
    }

    pub fn agent_mut(&mut self, id: AgentId) -> &mut Agent {
        &mut self.agents[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.agents.iter().map(|a| a.id)
    }

    pub fn count(&self, species: Species) -> usize {
        self.agents.iter().filter(|a| a.species == species).count()
    }

    pub fn prey_count(&self) -> usize {
        self.count(Species::Prey)
    }

    pub fn predator_count(&self) -> usize {
        self.count(Species::Predator)
    }

    /// Number of agents currently showing tag +1.
    pub fn positive_tag_count(&self) -> usize {
        self.agents
            .iter()
            .filter(|a| a.tag_state.tag.value() > 0)
            .count()
    }

    pub fn allocate_controller(&mut self) -> u64 {
        let id = self.next_controller;
        self.next_controller += 1;
        id
    }
}

/// Whether `target` can be perceived by `observer` as an adversary: opposite
/// species, same tag, and active.
pub fn is_observable_adversary(observer: &Agent, target: &Agent) -> bool {
    observer.species != target.species
        && observer.tag_state.tag == target.tag_state.tag
        && target.active
}

/// The closest observable agent of the opposite species. Ties go to the lowest id.
pub fn nearest_observable_adversary(agent: AgentId, world: &WorldState) -> Option<AgentId> {
    let me = world.agent(agent);
    let here = me.pose.position;
    world
        .agents
        .iter()
        .filter(|other| other.id != agent && is_observable_adversary(me, other))
        .map(|other| (here.distance(other.pose.position), other.id))
        // Iteration order is ascending id, so strict < keeps the lowest id on ties.
        .fold(None, |best: Option<(f64, AgentId)>, cand| match best {
            Some(b) if b.0 <= cand.0 => Some(b),
            _ => Some(cand),
        })
        .map(|(_, id)| id)
}
