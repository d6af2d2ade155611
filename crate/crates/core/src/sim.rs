//! Closed-loop simulation: elastic cables, winch motors and the PI controller
//! bank, integrated with classical RK4.
//!
//! Cables are stiff unilateral springs, so slack is emergent rather than
//! prescribed. Each controller measures its own winch's released length (what
//! an encoder sees) and its command is held constant across the RK4 stages of
//! one control step.

use alloc::vec::Vec;

use thiserror::Error;

use crate::control::{controller_bank, PiGains, PiState};
use crate::dynamics::{self, mechanical_power, DynamicsError};
use crate::kinematics::{self, KinematicsError};
use crate::math::{cos, floor, sgn, sin};
use crate::rig::{ConfigError, Cord, MotorState, PlatformState, Pose, PoseRate, RigConfig, SimConfig, CORD_COUNT};
use crate::trajectory::{plan_move, pose_at, TrajectoryError, TrapezoidalProfile};
use crate::vec2::Vec2;

/// Records kept on an instability abort.
pub const DIAGNOSTIC_TAIL: usize = 100;

/// The platform may leave the stand rectangle by this much before the run is
/// declared unstable, m.
pub const ESCAPE_MARGIN: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error("cannot find initial tensions: {0}")]
    Statics(#[from] DynamicsError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("simulation unstable at t = {time} s: {reason}")]
    Unstable {
        time: f64,
        reason: &'static str,
        /// Most recent records before the abort, oldest first.
        tail: Vec<TelemetryRecord>,
    },
}

/// One telemetry sample.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TelemetryRecord {
    /// s.
    pub time: f64,
    pub pose: Pose,
    pub pose_ref: Pose,
    /// Geometric cord lengths, m.
    pub lengths: [f64; CORD_COUNT],
    pub lengths_ref: [f64; CORD_COUNT],
    /// N.
    pub tensions: [f64; CORD_COUNT],
    /// Held torque commands, N·m.
    pub torques: [f64; CORD_COUNT],
    /// Shaft speeds, rad/s.
    pub speeds: [f64; CORD_COUNT],
    /// Total mechanical power, W.
    pub power: f64,
}

/// Snapshot of the full simulation state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimState {
    pub time: f64,
    pub platform: PlatformState,
    pub motors: [MotorState; CORD_COUNT],
    pub controllers: [PiState; CORD_COUNT],
}

/// Time derivative of the continuous part of [`SimState`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StateDerivative {
    pub velocity: PoseRate,
    pub acceleration: PoseRate,
    /// rad/s.
    pub shaft_speeds: [f64; CORD_COUNT],
    /// rad/s².
    pub shaft_accels: [f64; CORD_COUNT],
    /// Tensions at this state, N.
    pub tensions: [f64; CORD_COUNT],
}

/// Elastic cable tension. Zero whenever the cable is not stretched.
pub fn cable_tension(
    geometric_length: f64,
    released_length: f64,
    geometric_rate: f64,
    release_rate: f64,
    rig: &RigConfig,
) -> f64 {
    let stretch = geometric_length - released_length;
    if stretch <= 0.0 {
        return 0.0;
    }
    (rig.cable_stiffness * stretch + rig.cable_damping * (geometric_rate - release_rate)).max(0.0)
}

// Flat plant state: pose (3), pose rates (3), shaft angles (4), shaft speeds (4).
const N: usize = 14;
type Plant = [f64; N];

fn plant_rates(
    x: &Plant,
    released_at_zero: &[f64; CORD_COUNT],
    torques: &[f64; CORD_COUNT],
    rig: &RigConfig,
) -> Result<(Plant, [f64; CORD_COUNT]), KinematicsError> {
    let center = Vec2::new(x[0], x[1]);
    let velocity = Vec2::new(x[3], x[4]);
    let omega = x[5];
    let (s, c) = (sin(x[2]), cos(x[2]));
    let r = rig.pulley_radius;

    let mut force = Vec2::new(0.0, -rig.platform_mass * rig.gravity);
    let mut moment = 0.0;
    let mut tensions = [0.0; CORD_COUNT];
    let mut dx = [0.0; N];
    for cord in Cord::ALL {
        let k = cord.index();
        let local = cord.local_corner(rig);
        let offset = Vec2::new(c * local.x - s * local.y, s * local.x + c * local.y);
        let span = rig.anchor(cord) - (center + offset);
        let length = span.norm();
        if !(length > kinematics::MIN_CORD_LENGTH) {
            return Err(KinematicsError::Singular { cord, length });
        }
        let u = (1.0 / length) * span;
        let corner_velocity = velocity + omega * offset.perp();
        let length_rate = -u.dot(corner_velocity);

        let q = x[6 + k];
        let qd = x[10 + k];
        let released = released_at_zero[k] - r * q;
        let tension = cable_tension(length, released, length_rate, -r * qd, rig);
        tensions[k] = tension;
        force += tension * u;
        moment += tension * offset.cross(u);

        dx[6 + k] = qd;
        dx[10 + k] = (torques[k]
            - sgn(qd) * rig.dry_friction_torque
            - rig.viscous_damping * qd
            - tension * r)
            / rig.pulley_inertia;
    }
    dx[0] = x[3];
    dx[1] = x[4];
    dx[2] = x[5];
    dx[3] = force.x / rig.platform_mass;
    dx[4] = force.y / rig.platform_mass;
    dx[5] = moment / rig.platform_inertia;
    Ok((dx, tensions))
}

fn axpy(x: &Plant, h: f64, k: &Plant) -> Plant {
    let mut out = *x;
    for i in 0..N {
        out[i] += h * k[i];
    }
    out
}

fn rk4_step(
    x: &Plant,
    h: f64,
    released_at_zero: &[f64; CORD_COUNT],
    torques: &[f64; CORD_COUNT],
    rig: &RigConfig,
) -> Result<Plant, KinematicsError> {
    let f = |y: &Plant| plant_rates(y, released_at_zero, torques, rig).map(|(d, _)| d);
    let k1 = f(x)?;
    let k2 = f(&axpy(x, h / 2.0, &k1))?;
    let k3 = f(&axpy(x, h / 2.0, &k2))?;
    let k4 = f(&axpy(x, h, &k3))?;
    let mut out = *x;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Time derivative of a state under held motor torques.
pub fn derivatives(
    state: &SimState,
    torques: &[f64; CORD_COUNT],
    rig: &RigConfig,
) -> Result<StateDerivative, KinematicsError> {
    let mut x = [0.0; N];
    let mut released_at_zero = [0.0; CORD_COUNT];
    let p = &state.platform;
    x[..6].copy_from_slice(&[p.pose.x, p.pose.y, p.pose.theta, p.velocity.x, p.velocity.y, p.velocity.theta]);
    for (k, m) in state.motors.iter().enumerate() {
        x[6 + k] = m.shaft_angle;
        x[10 + k] = m.shaft_speed;
        released_at_zero[k] = m.released_length + rig.pulley_radius * m.shaft_angle;
    }
    let (dx, tensions) = plant_rates(&x, &released_at_zero, torques, rig)?;
    let mut out = StateDerivative {
        velocity: PoseRate::new(dx[0], dx[1], dx[2]),
        acceleration: PoseRate::new(dx[3], dx[4], dx[5]),
        tensions,
        ..StateDerivative::default()
    };
    out.shaft_speeds.copy_from_slice(&dx[6..10]);
    out.shaft_accels.copy_from_slice(&dx[10..14]);
    Ok(out)
}

/// Stepping simulator for one configured move.
#[derive(Clone, Debug)]
pub struct Simulator {
    config: SimConfig,
    profile: TrapezoidalProfile,
    released_at_zero: [f64; CORD_COUNT],
    plant: Plant,
    controllers: [PiState; CORD_COUNT],
    torques: [f64; CORD_COUNT],
    steps: u64,
}

impl Simulator {
    /// Start at rest at the move's start pose with the static tension
    /// distribution already in the cables and the integrators holding it.
    pub fn new(config: &SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let rig = &config.rig;
        let profile = plan_move(&config.start, &config.end, config.cruise_speed, config.accel, rig);
        let statics = dynamics::solve_static_tensions(&config.start, rig, &PoseRate::ZERO)?;
        let lengths = kinematics::inverse_kinematics(&config.start, rig)?;

        let gains = PiGains {
            kp: config.kp,
            ki: config.ki,
            windup_limit: config.effective_windup_limit(),
        };
        let mut released_at_zero = [0.0; CORD_COUNT];
        let mut controllers = [PiState::new(gains); CORD_COUNT];
        let mut torques = [0.0; CORD_COUNT];
        for k in 0..CORD_COUNT {
            let tension = statics.tensions[k];
            released_at_zero[k] = lengths[k] - tension / rig.cable_stiffness;
            let holding = tension * rig.pulley_radius;
            let error = released_at_zero[k] - lengths[k];
            if config.ki > 0.0 {
                controllers[k].integral = ((holding - config.kp * error) / config.ki)
                    .max(-gains.windup_limit)
                    .min(gains.windup_limit);
            }
            controllers[k].last_error = error;
            torques[k] = holding;
        }
        let mut plant = [0.0; N];
        plant[0] = config.start.x;
        plant[1] = config.start.y;
        plant[2] = config.start.theta;
        Ok(Self { config: *config, profile, released_at_zero, plant, controllers, torques, steps: 0 })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn profile(&self) -> &TrapezoidalProfile {
        &self.profile
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.config.time_step
    }

    /// Number of telemetry steps in a full run: the move plus the settle time.
    pub fn run_steps(&self) -> u64 {
        floor((self.profile.total_time + self.config.settle_time) / self.config.time_step + 1e-9) as u64
    }

    pub fn state(&self) -> SimState {
        let x = &self.plant;
        let r = self.config.rig.pulley_radius;
        let mut motors = [MotorState::default(); CORD_COUNT];
        for k in 0..CORD_COUNT {
            motors[k] = MotorState {
                shaft_angle: x[6 + k],
                shaft_speed: x[10 + k],
                commanded_torque: self.torques[k],
                released_length: self.released_at_zero[k] - r * x[6 + k],
            };
        }
        SimState {
            time: self.time(),
            platform: PlatformState {
                pose: Pose::new(x[0], x[1], x[2]),
                velocity: PoseRate::new(x[3], x[4], x[5]),
            },
            motors,
            controllers: self.controllers,
        }
    }

    fn reference_pose(&self, t: f64) -> Result<Pose, TrajectoryError> {
        let t = t.max(0.0).min(self.profile.total_time);
        Ok(pose_at(&self.profile, &self.config.start, &self.config.end, t)?.pose)
    }

    fn reference_lengths(&self, pose: &Pose) -> Result<[f64; CORD_COUNT], SimError> {
        let mut lengths = [0.0; CORD_COUNT];
        for cord in Cord::ALL {
            lengths[cord.index()] = kinematics::cord_geometry(pose, &self.config.rig, cord)?.length;
        }
        Ok(lengths)
    }

    fn check_health(&self, time: f64) -> Result<(), SimError> {
        let rig = &self.config.rig;
        if self.plant.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Unstable { time, reason: "non-finite state", tail: Vec::new() });
        }
        let (x, y) = (self.plant[0], self.plant[1]);
        if x < -ESCAPE_MARGIN
            || x > rig.stand_width + ESCAPE_MARGIN
            || y < -ESCAPE_MARGIN
            || y > rig.stand_height + ESCAPE_MARGIN
        {
            return Err(SimError::Unstable { time, reason: "platform left the stand", tail: Vec::new() });
        }
        Ok(())
    }

    /// Advance one telemetry step and return the sample at its end.
    pub fn step(&mut self) -> Result<TelemetryRecord, SimError> {
        let cfg = self.config;
        let rig = &cfg.rig;
        let h = cfg.time_step / cfg.substeps as f64;
        let t0 = self.time();
        for sub in 0..cfg.substeps {
            let t = t0 + sub as f64 * h;
            let reference = self.reference_lengths(&self.reference_pose(t)?)?;
            let mut errors = [0.0; CORD_COUNT];
            for k in 0..CORD_COUNT {
                let released = self.released_at_zero[k] - rig.pulley_radius * self.plant[6 + k];
                errors[k] = released - reference[k];
            }
            let (torques, controllers) = controller_bank(&errors, &self.controllers, h, rig.torque_limit);
            self.torques = torques;
            self.controllers = controllers;
            self.plant = match rk4_step(&self.plant, h, &self.released_at_zero, &self.torques, rig) {
                Ok(x) => x,
                Err(_) => {
                    return Err(SimError::Unstable { time: t, reason: "cord length collapsed", tail: Vec::new() })
                }
            };
            self.check_health(t + h)?;
        }
        self.steps += 1;
        self.record()
    }

    /// Telemetry sample at the current state.
    pub fn record(&self) -> Result<TelemetryRecord, SimError> {
        let time = self.time();
        let rig = &self.config.rig;
        let pose_ref = self.reference_pose(time)?;
        let state = self.state();
        let deriv = derivatives(&state, &self.torques, rig)?;
        let pose = state.platform.pose;
        let mut lengths = [0.0; CORD_COUNT];
        for cord in Cord::ALL {
            lengths[cord.index()] = kinematics::cord_geometry(&pose, rig, cord)?.length;
        }
        let speeds = deriv.shaft_speeds;
        Ok(TelemetryRecord {
            time,
            pose,
            pose_ref,
            lengths,
            lengths_ref: self.reference_lengths(&pose_ref)?,
            tensions: deriv.tensions,
            torques: self.torques,
            speeds,
            power: mechanical_power(&self.torques, &speeds),
        })
    }
}

/// Run a configured move to completion: one record per telemetry step over
/// the move plus the settle time.
pub fn run(config: &SimConfig) -> Result<Vec<TelemetryRecord>, SimError> {
    let mut sim = Simulator::new(config)?;
    let steps = sim.run_steps();
    let mut records = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        match sim.step() {
            Ok(record) => records.push(record),
            Err(SimError::Unstable { time, reason, .. }) => {
                let from = records.len().saturating_sub(DIAGNOSTIC_TAIL);
                return Err(SimError::Unstable { time, reason, tail: records.split_off(from) });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(records)
}
