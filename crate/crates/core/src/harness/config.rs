use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SimError};
use crate::world::BODY_COUNT;

/// Neither species may drop below this many bodies.
pub const SPECIES_FLOOR: usize = 7;
/// Length of a velocity measurement window in seconds.
pub const VELOCITY_WINDOW: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    /// Evolved tanh network.
    #[default]
    Neural,
    /// Fair coin flips for angle and tag; removes any heritable behaviour.
    CoinFlip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub duration: f64,
    pub tick: f64,
    pub control_period: f64,
    pub arena_side: f64,
    pub initial_prey: usize,
    pub initial_predators: usize,
    pub tag_cooldown: f64,
    pub catch_radius: f64,
    pub wall_threshold: f64,
    pub exemption_distance: f64,
    pub prey_repro_distance: f64,
    pub spawn_safe_distance: f64,
    pub mutation_sigma: f64,
    pub hidden_units: usize,
    pub random_birth_prob: f64,
    /// rad/s
    pub oscillator_frequency: f64,
    /// peak forward speed, units/s
    pub oscillator_amplitude: f64,
    pub track_width: f64,
    pub velocity_bucket: f64,
    pub controller: ControllerKind,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            duration: 6000.0,
            tick: 0.1,
            control_period: 2.0,
            arena_side: 40.0,
            initial_prey: 16,
            initial_predators: 14,
            tag_cooldown: 50.0,
            catch_radius: 1.0,
            wall_threshold: 1.0,
            exemption_distance: 5.0,
            prey_repro_distance: 5.0,
            spawn_safe_distance: 5.0,
            mutation_sigma: 0.1,
            hidden_units: 4,
            random_birth_prob: 1.0 / 3.0,
            oscillator_frequency: std::f64::consts::TAU,
            oscillator_amplitude: 2.0,
            track_width: 1.0,
            velocity_bucket: 200.0,
            controller: ControllerKind::Neural,
        }
    }
}

/// `b / a` when it is (within rounding) a positive integer.
fn whole_ratio(a: f64, b: f64) -> Option<u64> {
    let r = b / a;
    let n = r.round();
    (n >= 1.0 && (r - n).abs() < 1e-6).then_some(n as u64)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        let positive = [
            ("duration", self.duration),
            ("tick", self.tick),
            ("control_period", self.control_period),
            ("arena_side", self.arena_side),
            ("track_width", self.track_width),
            ("velocity_bucket", self.velocity_bucket),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be a positive finite number, got {v}"));
            }
        }
        let non_negative = [
            ("tag_cooldown", self.tag_cooldown),
            ("catch_radius", self.catch_radius),
            ("wall_threshold", self.wall_threshold),
            ("exemption_distance", self.exemption_distance),
            ("prey_repro_distance", self.prey_repro_distance),
            ("spawn_safe_distance", self.spawn_safe_distance),
            ("mutation_sigma", self.mutation_sigma),
            ("oscillator_amplitude", self.oscillator_amplitude),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be non-negative and finite, got {v}"));
            }
        }
        if !self.oscillator_frequency.is_finite() {
            return bad("oscillator_frequency must be finite".into());
        }
        if !(0.0..=1.0).contains(&self.random_birth_prob) {
            return bad(format!(
                "random_birth_prob must lie in [0, 1], got {}",
                self.random_birth_prob
            ));
        }
        if self.initial_prey + self.initial_predators != BODY_COUNT {
            return bad(format!(
                "initial_prey + initial_predators must be {BODY_COUNT}, got {}",
                self.initial_prey + self.initial_predators
            ));
        }
        if self.initial_prey < SPECIES_FLOOR || self.initial_predators < SPECIES_FLOOR {
            return bad(format!("both species need at least {SPECIES_FLOOR} bodies"));
        }
        if self.hidden_units == 0 {
            return bad("hidden_units must be at least 1".into());
        }
        if self.catch_radius >= self.arena_side || self.wall_threshold >= self.arena_side / 2.0 {
            return bad(
                "catch_radius and wall_threshold must be small relative to arena_side".into(),
            );
        }
        if whole_ratio(self.tick, self.control_period).is_none() {
            return bad("control_period must be a whole multiple of tick".into());
        }
        if whole_ratio(self.tick, self.duration).is_none() {
            return bad("duration must be a whole multiple of tick".into());
        }
        if whole_ratio(self.control_period, VELOCITY_WINDOW).is_none() {
            return bad(format!(
                "control_period must divide the {VELOCITY_WINDOW} s velocity window"
            ));
        }
        if self.velocity_bucket > self.duration {
            return bad("velocity_bucket cannot exceed duration".into());
        }
        Ok(())
    }

    pub fn total_ticks(&self) -> u64 {
        whole_ratio(self.tick, self.duration).expect("validated config")
    }

    pub fn ticks_per_control(&self) -> u64 {
        whole_ratio(self.tick, self.control_period).expect("validated config")
    }

    pub fn window_steps(&self) -> usize {
        whole_ratio(self.control_period, VELOCITY_WINDOW).expect("validated config") as usize
    }

    pub fn time_at(&self, tick: u64) -> f64 {
        tick as f64 * self.tick
    }

    /// Number of control steps (and samples), including t = 0 and t = duration.
    pub fn sample_count(&self) -> usize {
        (self.total_ticks() / self.ticks_per_control()) as usize + 1
    }

    /// Hash of everything except the seed: two logs with the same hash come from
    /// the same model and can be replayed under the same config file.
    pub fn model_hash(&self) -> String {
        let mut normalized = self.clone();
        normalized.seed = 0;
        let bytes = serde_json::to_vec(&normalized).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
