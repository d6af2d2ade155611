//! Configuration and state types shared by every other module.

use thiserror::Error;

use crate::kinematics;
use crate::vec2::Vec2;

/// Number of cords (and motors) on the rig.
pub const CORD_COUNT: usize = 4;

/// A cord, identified by the stand corner its motor is mounted on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cord {
    UpperLeft,
    UpperRight,
    LowerLeft,
    LowerRight,
}

impl Cord {
    pub const ALL: [Cord; CORD_COUNT] =
        [Cord::UpperLeft, Cord::UpperRight, Cord::LowerLeft, Cord::LowerRight];

    /// Zero-based index into per-cord arrays.
    pub const fn index(self) -> usize {
        match self {
            Cord::UpperLeft => 0,
            Cord::UpperRight => 1,
            Cord::LowerLeft => 2,
            Cord::LowerRight => 3,
        }
    }

    /// One-based cord number as used in logs and reports.
    pub const fn number(self) -> usize {
        self.index() + 1
    }

    pub fn from_number(n: usize) -> Option<Cord> {
        Cord::ALL.get(n.checked_sub(1)?).copied()
    }

    pub const fn is_upper(self) -> bool {
        matches!(self, Cord::UpperLeft | Cord::UpperRight)
    }

    pub const fn is_left(self) -> bool {
        matches!(self, Cord::UpperLeft | Cord::LowerLeft)
    }

    /// Corner offset in the platform frame, before rotation by θ.
    pub(crate) fn local_corner(self, rig: &RigConfig) -> Vec2 {
        let hx = rig.platform_width / 2.0;
        let hy = rig.platform_height / 2.0;
        Vec2::new(
            if self.is_left() { -hx } else { hx },
            if self.is_upper() { hy } else { -hy },
        )
    }
}

/// Physical parameters of the stand, platform, winches and cables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigConfig {
    /// Stand height `A`, m.
    pub stand_height: f64,
    /// Stand width `B`, m.
    pub stand_width: f64,
    /// Platform height `a`, m.
    pub platform_height: f64,
    /// Platform width `b`, m.
    pub platform_width: f64,
    /// Platform mass, kg.
    pub platform_mass: f64,
    /// Platform inertia about its center, kg·m².
    pub platform_inertia: f64,
    /// Winch pulley radius, m.
    pub pulley_radius: f64,
    /// Pulley plus rotor inertia, kg·m².
    pub pulley_inertia: f64,
    /// Viscous damping, N·m·s/rad.
    pub viscous_damping: f64,
    /// Coulomb friction torque, N·m.
    pub dry_friction_torque: f64,
    /// m/s².
    pub gravity: f64,
    /// Cable axial stiffness, N/m.
    pub cable_stiffness: f64,
    /// Cable axial damping, N·s/m.
    pub cable_damping: f64,
    /// Motor torque saturation, N·m.
    pub torque_limit: f64,
    /// Rated motor speed, rad/s.
    pub speed_limit: f64,
}

impl Default for RigConfig {
    fn default() -> Self {
        Self {
            stand_height: 0.70,
            stand_width: 0.60,
            platform_height: 0.028,
            platform_width: 0.158,
            platform_mass: 0.1,
            platform_inertia: 2.617e-4,
            pulley_radius: 0.025,
            pulley_inertia: 3.125e-5,
            viscous_damping: 0.001,
            dry_friction_torque: 0.01,
            gravity: 9.81,
            cable_stiffness: 1.0e4,
            cable_damping: 10.0,
            torque_limit: 2.0,
            speed_limit: 193.0 * 2.0 * core::f64::consts::PI / 60.0,
        }
    }
}

/// A violated configuration invariant, naming the offending field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("{field}: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: &'static str,
}

impl ConfigError {
    pub const fn new(field: &'static str, reason: &'static str) -> Self {
        Self { field, reason }
    }
}

fn positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(field, "must be finite and strictly positive"))
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(field, "must be finite and non-negative"))
    }
}

impl RigConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("stand_height", self.stand_height)?;
        positive("stand_width", self.stand_width)?;
        positive("platform_height", self.platform_height)?;
        positive("platform_width", self.platform_width)?;
        positive("platform_mass", self.platform_mass)?;
        positive("platform_inertia", self.platform_inertia)?;
        positive("pulley_radius", self.pulley_radius)?;
        positive("pulley_inertia", self.pulley_inertia)?;
        positive("cable_stiffness", self.cable_stiffness)?;
        non_negative("cable_damping", self.cable_damping)?;
        non_negative("viscous_damping", self.viscous_damping)?;
        non_negative("dry_friction_torque", self.dry_friction_torque)?;
        non_negative("gravity", self.gravity)?;
        positive("torque_limit", self.torque_limit)?;
        positive("speed_limit", self.speed_limit)?;
        if self.platform_height >= self.stand_height {
            return Err(ConfigError::new(
                "platform_height",
                "platform height must be smaller than the stand height",
            ));
        }
        if self.platform_width >= self.stand_width {
            return Err(ConfigError::new(
                "platform_width",
                "platform width must be smaller than the stand width",
            ));
        }
        Ok(())
    }

    /// Fixed winch anchor of `cord`.
    pub fn anchor(&self, cord: Cord) -> Vec2 {
        Vec2::new(
            if cord.is_left() { 0.0 } else { self.stand_width },
            if cord.is_upper() { self.stand_height } else { 0.0 },
        )
    }

    /// Distance from the platform center to any corner.
    pub fn half_diagonal(&self) -> f64 {
        Vec2::new(self.platform_width / 2.0, self.platform_height / 2.0).norm()
    }
}

/// Platform configuration `(Px, Py, θ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// First or second time derivative of a [`Pose`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PoseRate {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl PoseRate {
    pub const ZERO: PoseRate = PoseRate { x: 0.0, y: 0.0, theta: 0.0 };

    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn linear(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// The platform's generalized coordinates and velocities.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PlatformState {
    pub pose: Pose,
    pub velocity: PoseRate,
}

/// Instantaneous state of one cord.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CordState {
    /// Anchor-to-corner distance, m.
    pub length: f64,
    /// m/s.
    pub rate: f64,
    /// Direction angle against the x-axis (α, β, γ, δ for cords 1..4), rad.
    pub angle: f64,
    /// N, never negative.
    pub tension: f64,
    pub slack: bool,
}

/// Instantaneous state of one winch motor.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MotorState {
    /// Shaft angle, rad. Positive winds cable in.
    pub shaft_angle: f64,
    /// rad/s.
    pub shaft_speed: f64,
    /// Saturated torque command, N·m.
    pub commanded_torque: f64,
    /// Cable paid out by this winch, m.
    pub released_length: f64,
}

/// Planar linkage topology for Grübler's mobility count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Topology {
    pub links: i32,
    pub pin_joints: i32,
    pub cylindrical_joints: i32,
}

impl Topology {
    /// Ground, platform and three rigid cords joined by six pins.
    pub const SCAFFOLD: Topology = Topology { links: 5, pin_joints: 6, cylindrical_joints: 0 };

    /// Net degrees of freedom, `3n - 2j1 - j2 - 3`.
    pub const fn mobility(&self) -> i32 {
        3 * self.links - 2 * self.pin_joints - self.cylindrical_joints - 3
    }
}

/// Mobility of the rig with three cords at prescribed lengths. Always 0: the
/// platform pose is locked.
pub fn validate_mobility(_rig: &RigConfig) -> i32 {
    Topology::SCAFFOLD.mobility()
}

/// Everything needed for one closed-loop run: rig, move, controller gains and
/// integration settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub rig: RigConfig,
    pub start: Pose,
    pub end: Pose,
    /// Cruise speed of the trapezoidal profile, m/s.
    pub cruise_speed: f64,
    /// Ramp acceleration, m/s².
    pub accel: f64,
    /// Proportional gain, N·m per meter of length error.
    pub kp: f64,
    /// Integral gain, N·m per meter-second.
    pub ki: f64,
    /// Integrator clamp, m·s. `None` selects `torque_limit / ki`.
    pub windup_limit: Option<f64>,
    /// Telemetry step, s.
    pub time_step: f64,
    /// Control and integration steps per telemetry step.
    pub substeps: u32,
    /// Extra simulated time after the reference stops, s.
    pub settle_time: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            rig: RigConfig::default(),
            start: Pose::new(0.10, 0.10, 0.0),
            end: Pose::new(0.30, 0.60, 0.0),
            cruise_speed: 0.05,
            accel: 0.1,
            kp: 2000.0,
            ki: 500.0,
            windup_limit: None,
            time_step: 1e-3,
            substeps: 10,
            settle_time: 2.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.rig.validate()?;
        for (field, pose) in [("start_pose", &self.start), ("end_pose", &self.end)] {
            if !(pose.x.is_finite() && pose.y.is_finite() && pose.theta.is_finite()) {
                return Err(ConfigError::new(field, "pose must be finite"));
            }
            if !kinematics::in_workspace(pose, &self.rig) {
                return Err(ConfigError::new(field, "pose is outside the workspace"));
            }
        }
        positive("cruise_speed", self.cruise_speed)?;
        positive("accel", self.accel)?;
        positive("time_step", self.time_step)?;
        positive("settle_time", self.settle_time)?;
        non_negative("kp", self.kp)?;
        non_negative("ki", self.ki)?;
        if let Some(limit) = self.windup_limit {
            positive("windup_limit", limit)?;
        }
        if self.substeps == 0 {
            return Err(ConfigError::new("substeps", "must be at least 1"));
        }
        Ok(())
    }

    /// Integrator clamp in effect.
    pub fn effective_windup_limit(&self) -> f64 {
        self.windup_limit.unwrap_or(if self.ki > 0.0 {
            self.rig.torque_limit / self.ki
        } else {
            f64::INFINITY
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RigConfig::default().validate().unwrap();
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn oversize_platform_names_field() {
        let rig = RigConfig { platform_height: 0.8, ..RigConfig::default() };
        assert_eq!(rig.validate().unwrap_err().field, "platform_height");
        let rig = RigConfig { platform_width: 0.6, ..RigConfig::default() };
        assert_eq!(rig.validate().unwrap_err().field, "platform_width");
    }

    #[test]
    fn non_positive_fields_rejected() {
        let rig = RigConfig { pulley_radius: 0.0, ..RigConfig::default() };
        assert_eq!(rig.validate().unwrap_err().field, "pulley_radius");
        let rig = RigConfig { platform_mass: f64::NAN, ..RigConfig::default() };
        assert_eq!(rig.validate().unwrap_err().field, "platform_mass");
    }

    #[test]
    fn grubler_counts() {
        assert_eq!(Topology::SCAFFOLD.mobility(), 0);
        assert_eq!(Topology { links: 5, pin_joints: 5, cylindrical_joints: 0 }.mobility(), 2);
        assert_eq!(Topology { links: 4, pin_joints: 4, cylindrical_joints: 0 }.mobility(), 1);
        assert_eq!(validate_mobility(&RigConfig::default()), 0);
    }

    #[test]
    fn speed_limit_is_193_rpm() {
        let rig = RigConfig::default();
        assert!((rig.speed_limit - 20.210_912_738_094_3).abs() < 1e-9);
    }

    #[test]
    fn anchors_follow_corner_convention() {
        let rig = RigConfig::default();
        assert_eq!(rig.anchor(Cord::UpperLeft), Vec2::new(0.0, 0.70));
        assert_eq!(rig.anchor(Cord::UpperRight), Vec2::new(0.60, 0.70));
        assert_eq!(rig.anchor(Cord::LowerLeft), Vec2::new(0.0, 0.0));
        assert_eq!(rig.anchor(Cord::LowerRight), Vec2::new(0.60, 0.0));
        assert_eq!(Cord::from_number(3), Some(Cord::LowerLeft));
        assert_eq!(Cord::from_number(0), None);
        assert_eq!(Cord::from_number(5), None);
    }

    #[test]
    fn sim_config_rejects_bad_values() {
        let cfg = SimConfig { end: Pose::new(0.0, 0.6, 0.0), ..SimConfig::default() };
        assert_eq!(cfg.validate().unwrap_err().field, "end_pose");
        let cfg = SimConfig { time_step: 0.0, ..SimConfig::default() };
        assert_eq!(cfg.validate().unwrap_err().field, "time_step");
        let cfg = SimConfig { substeps: 0, ..SimConfig::default() };
        assert_eq!(cfg.validate().unwrap_err().field, "substeps");
        assert!((SimConfig::default().effective_windup_limit() - 0.004).abs() < 1e-15);
    }
}
