//! Kinematic gait model: a rhythmic speed oscillator plus differential steering.
//!
//! A positive target angle slows the right side by the steering factor, so the
//! body turns clockwise (to the right). Headings are stored counter-clockwise,
//! hence the subtraction in [`step_kinematics`].

use std::f64::consts::{PI, TAU};

use crate::world::{wrap_angle, Point, Pose};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitOscillator {
    /// Radians in [0, 2pi).
    pub phase: f64,
    pub angular_frequency: f64,
    /// Peak forward speed.
    pub amplitude: f64,
}

impl GaitOscillator {
    pub fn new(phase: f64, angular_frequency: f64, amplitude: f64) -> Self {
        assert!(amplitude >= 0.0, "gait amplitude must be non-negative");
        Self {
            phase: phase.rem_euclid(TAU),
            angular_frequency,
            amplitude,
        }
    }

    pub fn speed(&self) -> f64 {
        self.amplitude * (1.0 + self.phase.sin()) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringState {
    pub alpha: f64,
    pub track_width: f64,
}

impl SteeringState {
    pub fn new(alpha: f64, track_width: f64) -> Self {
        assert!(track_width > 0.0, "track width must be positive");
        Self { alpha, track_width }
    }
}

/// Slow-down factor applied to the side the robot turns toward:
/// `((pi - |alpha|) / pi)^2`. Inputs outside [-pi, pi] are wrapped first.
pub fn steering_scale(alpha: f64) -> f64 {
    let a = if alpha.abs() > PI {
        wrap_angle(alpha)
    } else {
        alpha
    };
    let r = (PI - a.abs()) / PI;
    (r * r).clamp(0.0, 1.0)
}

/// Advances the oscillator by `dt` and returns it together with the speed at the new phase.
pub fn oscillator_step(osc: GaitOscillator, dt: f64) -> (GaitOscillator, f64) {
    let next = GaitOscillator {
        phase: (osc.phase + osc.angular_frequency * dt).rem_euclid(TAU),
        ..osc
    };
    let speed = next.speed();
    (next, speed)
}

/// (left, right) side speeds for a target angle.
pub fn side_speeds(alpha: f64, base_speed: f64) -> (f64, f64) {
    let slowed = base_speed * steering_scale(alpha);
    if alpha >= 0.0 {
        (base_speed, slowed)
    } else {
        (slowed, base_speed)
    }
}

/// One differential-drive step. The returned position is not clamped to the arena.
pub fn step_kinematics(
    pose: Pose,
    alpha: f64,
    base_speed: f64,
    steering: &SteeringState,
    dt: f64,
) -> Pose {
    let (left, right) = side_speeds(alpha, base_speed);
    let forward = (left + right) / 2.0;
    let turn_rate = (left - right) / steering.track_width;
    let heading = wrap_angle(pose.heading - turn_rate * dt);
    let position = Point::new(
        pose.position.x + forward * dt * heading.cos(),
        pose.position.y + forward * dt * heading.sin(),
    );
    Pose { position, heading }
}
