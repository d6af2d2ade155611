//! Planar four-cable suspended platform: geometry, cord kinematics, tension
//! statics, actuator torque models, trapezoidal reference generation, per-cord
//! PI control and a fixed-step closed-loop simulator.
//!
//! The crate is `no_std` and only needs `alloc` for telemetry and reference
//! series. File formats and the command-line front end live in the `scaffold`
//! crate.
//!
//! Conventions used throughout:
//!
//! - SI units everywhere (m, rad, s, N, N·m).
//! - Anchors sit at the stand corners: cord 1 at `(0, A)`, cord 2 at `(B, A)`,
//!   cord 3 at `(0, 0)`, cord 4 at `(B, 0)`. Platform corners are numbered to
//!   match their cords.
//! - Positive motor speed winds cable in and shortens the cord.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod control;
pub mod dynamics;
pub mod kinematics;
mod linalg;
mod math;
pub mod report;
pub mod rig;
pub mod sim;
pub mod trajectory;
mod vec2;

pub use control::{controller_bank, pi_step, PiGains, PiState};
pub use dynamics::{
    actuator_torque, mechanical_power, required_torques, solve_static_tensions,
    wrench_of_tensions, DynamicsError, TensionSolution, TorqueModel, WrenchBalance,
};
pub use kinematics::{
    corner_derivatives, corner_position, cord_geometry, cord_jacobian, cord_rates,
    forward_kinematics, in_workspace, inverse_kinematics, pulley_map, CordJacobian, CordMotion,
    CornerKinematics, KinematicsError,
};
pub use report::{compute_rms, ReportError, RmsReport};
pub use rig::{
    validate_mobility, ConfigError, Cord, CordState, MotorState, PlatformState, Pose, PoseRate,
    RigConfig, SimConfig, Topology,
};
pub use sim::{cable_tension, run, SimError, SimState, Simulator, TelemetryRecord};
pub use trajectory::{
    plan_move, plan_profile, pose_at, reference_series, ReferenceSample, ReferenceSeries,
    TrajectoryError, TrapezoidalProfile,
};
pub use vec2::Vec2;
