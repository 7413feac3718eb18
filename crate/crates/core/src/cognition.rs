//! The cognitive brain: perception, a fixed-topology tanh network, output
//! decoding, the tagging system and genotype variation.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::world::{nearest_observable_adversary, relative_bearing, AgentId, WorldState};

pub const INPUTS: usize = 3;
pub const OUTPUTS: usize = 2;
/// Magnitude of the target angle handed to the steering law.
pub const TARGET_ANGLE: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Tag {
    Negative,
    Positive,
}

impl Tag {
    pub fn value(self) -> i8 {
        match self {
            Tag::Negative => -1,
            Tag::Positive => 1,
        }
    }

    pub fn from_sign(x: f64) -> Self {
        if x >= 0.0 {
            Tag::Positive
        } else {
            Tag::Negative
        }
    }
}

impl From<Tag> for i8 {
    fn from(t: Tag) -> i8 {
        t.value()
    }
}

impl TryFrom<i8> for Tag {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            -1 => Ok(Tag::Negative),
            1 => Ok(Tag::Positive),
            other => Err(format!("tag must be -1 or 1, got {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Random,
    Inherited,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Random => "random",
            Origin::Inherited => "inherited",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
}

impl Topology {
    pub fn with_hidden(hidden: usize) -> Self {
        Self {
            inputs: INPUTS,
            hidden,
            outputs: OUTPUTS,
        }
    }

    /// Weights plus one bias per hidden and output neuron.
    pub fn weight_count(&self) -> usize {
        self.inputs * self.hidden + self.hidden + self.hidden * self.outputs + self.outputs
    }
}

/// Flat weight vector laid out as: input->hidden rows (one row of `inputs`
/// weights per hidden neuron), hidden biases, hidden->output rows, output biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrainGenotype {
    pub topology: Topology,
    pub weights: Vec<f64>,
    pub origin: Origin,
}

impl BrainGenotype {
    pub fn new(topology: Topology, weights: Vec<f64>, origin: Origin) -> Self {
        assert_eq!(
            weights.len(),
            topology.weight_count(),
            "weight vector does not match topology"
        );
        Self {
            topology,
            weights,
            origin,
        }
    }

    pub fn zeros(hidden: usize) -> Self {
        let t = Topology::with_hidden(hidden);
        Self::new(t, vec![0.0; t.weight_count()], Origin::Random)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerceptionInputs {
    /// -1 when the adversary is on the left, +1 otherwise.
    pub angle: f64,
    /// Distance to the adversary over the arena diagonal.
    pub distance: f64,
    pub tag_ratio: f64,
}

impl PerceptionInputs {
    pub fn as_array(&self) -> [f64; INPUTS] {
        [self.angle, self.distance, self.tag_ratio]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TagState {
    pub tag: Tag,
    /// `None` until the first switch; a body with no history may switch at once.
    pub last_switch_time: Option<f64>,
}

impl TagState {
    pub fn new(tag: Tag) -> Self {
        Self {
            tag,
            last_switch_time: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlDecision {
    pub target_angle: f64,
    pub desired_tag: Tag,
}

/// `(P - N/2) / N` where P counts tag +1 among all N agents.
pub fn tag_ratio(positive: usize, total: usize) -> f64 {
    let n = total as f64;
    (positive as f64 - n / 2.0) / n
}

pub fn sense(agent: AgentId, world: &WorldState) -> PerceptionInputs {
    let ratio = tag_ratio(world.positive_tag_count(), world.agents.len());
    let me = world.agent(agent);
    match nearest_observable_adversary(agent, world) {
        Some(adv) => {
            let target = world.agent(adv).pose.position;
            let bearing = relative_bearing(&me.pose, target);
            let distance = me.pose.position.distance(target) / world.arena.diagonal();
            PerceptionInputs {
                angle: if bearing < 0.0 { -1.0 } else { 1.0 },
                distance: distance.clamp(0.0, 1.0),
                tag_ratio: ratio,
            }
        }
        None => PerceptionInputs {
            angle: 1.0,
            distance: 1.0,
            tag_ratio: ratio,
        },
    }
}

/// Feed-forward pass with tanh on hidden and output layers. Returns (raw_angle, raw_tag).
pub fn forward(brain: &BrainGenotype, inputs: &PerceptionInputs) -> (f64, f64) {
    let Topology {
        inputs: n_in,
        hidden,
        outputs: n_out,
    } = brain.topology;
    let x = inputs.as_array();
    let w = &brain.weights;
    let (w_ih, rest) = w.split_at(n_in * hidden);
    let (b_h, rest) = rest.split_at(hidden);
    let (w_ho, b_o) = rest.split_at(hidden * n_out);

    let h: Vec<f64> = w_ih
        .chunks_exact(n_in)
        .zip(b_h)
        .map(|(row, b)| (row.iter().zip(&x).map(|(wi, xi)| wi * xi).sum::<f64>() + b).tanh())
        .collect();
    let mut out = w_ho
        .chunks_exact(hidden)
        .zip(b_o)
        .map(|(row, b)| (row.iter().zip(&h).map(|(wi, hi)| wi * hi).sum::<f64>() + b).tanh());
    let raw_angle = out.next().unwrap_or(0.0);
    let raw_tag = out.next().unwrap_or(0.0);
    (raw_angle, raw_tag)
}

pub fn decide(raw_angle: f64, raw_tag: f64) -> ControlDecision {
    ControlDecision {
        target_angle: if raw_angle >= 0.0 {
            TARGET_ANGLE
        } else {
            -TARGET_ANGLE
        },
        desired_tag: Tag::from_sign(raw_tag),
    }
}

/// Switches to `desired` only if it differs and the cooldown has elapsed.
pub fn apply_tag(state: TagState, desired: Tag, now: f64, cooldown: f64) -> TagState {
    if desired == state.tag {
        return state;
    }
    match state.last_switch_time {
        Some(last) if now - last < cooldown => state,
        _ => TagState {
            tag: desired,
            last_switch_time: Some(now),
        },
    }
}

/// Gaussian perturbation of every weight; the child is always `Inherited`.
pub fn mutate<R: Rng + ?Sized>(parent: &BrainGenotype, sigma: f64, rng: &mut R) -> BrainGenotype {
    assert!(sigma >= 0.0, "mutation sigma must be non-negative");
    let weights = if sigma == 0.0 {
        parent.weights.clone()
    } else {
        let normal = Normal::new(0.0, sigma).expect("finite sigma");
        parent
            .weights
            .iter()
            .map(|w| w + normal.sample(rng))
            .collect()
    };
    BrainGenotype::new(parent.topology, weights, Origin::Inherited)
}

pub fn random_genotype<R: Rng + ?Sized>(hidden: usize, rng: &mut R) -> BrainGenotype {
    let topology = Topology::with_hidden(hidden);
    let weights = (0..topology.weight_count())
        .map(|_| rng.random_range(-1.0..=1.0))
        .collect();
    BrainGenotype::new(topology, weights, Origin::Random)
}
