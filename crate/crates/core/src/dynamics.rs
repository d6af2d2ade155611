//! Platform force/moment balance, static tension distribution with one
//! redundant cord, and winch torque models.

use thiserror::Error;

use crate::kinematics::{self, cord_direction, pulley_map, KinematicsError};
use crate::linalg;
use crate::math::{abs, sgn};
use crate::rig::{Cord, Pose, PoseRate, RigConfig, CORD_COUNT};
use crate::vec2::Vec2;

/// Tensions down to this value are treated as zero by the triple selection, N.
pub const TENSION_FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// 3×3 tension systems above this condition number are rejected.
pub const MAX_TENSION_CONDITION: f64 = 1e10;

/// The two taut triples the platform can hang from, with the cord they leave
/// slack.
const CANDIDATE_TRIPLES: [([Cord; 3], Cord); 2] = [
    ([Cord::UpperLeft, Cord::UpperRight, Cord::LowerLeft], Cord::LowerRight),
    ([Cord::UpperLeft, Cord::UpperRight, Cord::LowerRight], Cord::LowerLeft),
];

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("no taut cord triple holds pose {pose:?} with non-negative tensions")]
    Infeasible { pose: Pose },
    #[error("tension system is near-singular (condition number {condition:e})")]
    IllConditioned { condition: f64 },
}

/// Net wrench on the platform from cord tensions and gravity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WrenchBalance {
    /// N.
    pub net_force: Vec2,
    /// About the platform center, N·m.
    pub net_moment: f64,
    /// Unit vectors from each corner toward its anchor.
    pub directions: [Vec2; CORD_COUNT],
    /// Moment about the platform center per newton of tension, m.
    pub moment_arms: [f64; CORD_COUNT],
}

/// Static tension distribution over one taut triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensionSolution {
    pub tensions: [f64; CORD_COUNT],
    pub taut: [Cord; 3],
    pub slack: Cord,
}

/// Which winch torque expression to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TorqueModel {
    /// Inertial term `-(I/r)·q̈`.
    InertiaOverRadius,
    /// Inertial term `+I·q̈`, dimensionally consistent.
    #[default]
    Consistent,
}

fn cord_terms(pose: &Pose, rig: &RigConfig) -> Result<([Vec2; CORD_COUNT], [f64; CORD_COUNT]), KinematicsError> {
    let mut dirs = [Vec2::ZERO; CORD_COUNT];
    let mut arms = [0.0; CORD_COUNT];
    for cord in Cord::ALL {
        let (u, _) = cord_direction(pose, rig, cord)?;
        let offset = kinematics::corner_position(pose, rig, cord) - pose.position();
        dirs[cord.index()] = u;
        arms[cord.index()] = offset.cross(u);
    }
    Ok((dirs, arms))
}

/// Net force and moment on the platform for the given cord tensions.
pub fn wrench_of_tensions(
    pose: &Pose,
    rig: &RigConfig,
    tensions: &[f64; CORD_COUNT],
) -> Result<WrenchBalance, KinematicsError> {
    let (directions, moment_arms) = cord_terms(pose, rig)?;
    let mut net_force = Vec2::new(0.0, -rig.platform_mass * rig.gravity);
    let mut net_moment = 0.0;
    for k in 0..CORD_COUNT {
        net_force += tensions[k] * directions[k];
        net_moment += tensions[k] * moment_arms[k];
    }
    Ok(WrenchBalance { net_force, net_moment, directions, moment_arms })
}

/// Tensions that give the platform the requested acceleration, carried by one
/// of the two taut triples.
///
/// A triple is feasible when all its tensions are non-negative. When both are
/// feasible the lower cord on the platform's side of the stand centerline is
/// kept taut.
pub fn solve_static_tensions(
    pose: &Pose,
    rig: &RigConfig,
    accel: &PoseRate,
) -> Result<TensionSolution, DynamicsError> {
    if !kinematics::in_workspace(pose, rig) {
        return Err(KinematicsError::OutsideWorkspace { pose: *pose }.into());
    }
    let (dirs, arms) = cord_terms(pose, rig)?;
    let m = rig.platform_mass;
    let rhs = [m * accel.x, m * (accel.y + rig.gravity), rig.platform_inertia * accel.theta];

    let mut feasible: [Option<TensionSolution>; 2] = [None, None];
    let mut worst_condition: Option<f64> = None;
    for (slot, (taut, slack)) in CANDIDATE_TRIPLES.iter().enumerate() {
        let mut mat = [[0.0; 3]; 3];
        for (col, cord) in taut.iter().enumerate() {
            let k = cord.index();
            mat[0][col] = dirs[k].x;
            mat[1][col] = dirs[k].y;
            mat[2][col] = arms[k];
        }
        let solved = linalg::solve(&mat, &rhs);
        let t = match solved {
            Some((t, c)) if c <= MAX_TENSION_CONDITION => t,
            other => {
                let c = other.map_or(f64::INFINITY, |(_, c)| c);
                worst_condition = Some(worst_condition.map_or(c, |w: f64| w.max(c)));
                continue;
            }
        };
        if t.iter().all(|&v| v >= -TENSION_FEASIBILITY_TOLERANCE) {
            let mut tensions = [0.0; CORD_COUNT];
            for (col, cord) in taut.iter().enumerate() {
                tensions[cord.index()] = t[col].max(0.0);
            }
            feasible[slot] = Some(TensionSolution { tensions, taut: *taut, slack: *slack });
        }
    }

    let left_half = pose.x < rig.stand_width / 2.0;
    match feasible {
        [Some(a), Some(b)] => Ok(if left_half { a } else { b }),
        [Some(a), None] => Ok(a),
        [None, Some(b)] => Ok(b),
        [None, None] => match worst_condition {
            Some(condition) => Err(DynamicsError::IllConditioned { condition }),
            None => Err(DynamicsError::Infeasible { pose: *pose }),
        },
    }
}

/// Winch torque needed at shaft speed `speed` and acceleration `accel` while
/// the cord carries `tension`.
pub fn actuator_torque(speed: f64, accel: f64, tension: f64, rig: &RigConfig, model: TorqueModel) -> f64 {
    let inertial = match model {
        TorqueModel::InertiaOverRadius => -(rig.pulley_inertia / rig.pulley_radius) * accel,
        TorqueModel::Consistent => rig.pulley_inertia * accel,
    };
    sgn(speed) * rig.dry_friction_torque + rig.viscous_damping * speed + tension * rig.pulley_radius + inertial
}

/// Total mechanical power magnitude, `Σ |τᵢ·ωᵢ|`, W.
pub fn mechanical_power(torques: &[f64; CORD_COUNT], speeds: &[f64; CORD_COUNT]) -> f64 {
    torques.iter().zip(speeds).map(|(t, w)| abs(t * w)).sum()
}

/// Inverse dynamics along a prescribed platform motion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RequiredTorques {
    pub tensions: TensionSolution,
    /// Shaft speeds, rad/s.
    pub speeds: [f64; CORD_COUNT],
    /// Shaft accelerations, rad/s².
    pub accels: [f64; CORD_COUNT],
    /// N·m.
    pub torques: [f64; CORD_COUNT],
}

/// Motor torques that realize the given platform motion with rigid cords.
pub fn required_torques(
    pose: &Pose,
    rate: &PoseRate,
    accel: &PoseRate,
    rig: &RigConfig,
    model: TorqueModel,
) -> Result<RequiredTorques, DynamicsError> {
    let tensions = solve_static_tensions(pose, rig, accel)?;
    let mut speeds = [0.0; CORD_COUNT];
    let mut accels = [0.0; CORD_COUNT];
    let mut torques = [0.0; CORD_COUNT];
    for cord in Cord::ALL {
        let k = cord.index();
        let motion = kinematics::cord_rates(pose, rate, accel, rig, cord)?;
        let (w, wd) = pulley_map(motion.rate, motion.acceleration, rig);
        speeds[k] = w;
        accels[k] = wd;
        torques[k] = actuator_torque(w, wd, tensions.tensions[k], rig, model);
    }
    Ok(RequiredTorques { tensions, speeds, accels, torques })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::cord_geometry;

    fn rig() -> RigConfig {
        RigConfig::default()
    }

    #[test]
    fn gravity_only() {
        let w = wrench_of_tensions(&Pose::new(0.3, 0.35, 0.2), &rig(), &[0.0; 4]).unwrap();
        assert_eq!(w.net_force.x, 0.0);
        assert!((w.net_force.y + 0.981).abs() < 1e-15);
        assert_eq!(w.net_moment, 0.0);
    }

    #[test]
    fn directions_point_at_anchors() {
        let r = rig();
        let pose = Pose::new(0.25, 0.4, -0.3);
        let w = wrench_of_tensions(&pose, &r, &[1.0; 4]).unwrap();
        for cord in Cord::ALL {
            let corner = kinematics::corner_position(&pose, &r, cord);
            let to_anchor = r.anchor(cord) - corner;
            let u = w.directions[cord.index()];
            assert!((u.norm() - 1.0).abs() < 1e-15);
            assert!(u.cross(to_anchor).abs() < 1e-15 && u.dot(to_anchor) > 0.0);
        }
    }

    #[test]
    fn single_cord_force_uses_angle() {
        let r = rig();
        let pose = Pose::new(0.10, 0.10, 0.0);
        let alpha = cord_geometry(&pose, &r, Cord::UpperLeft).unwrap().angle;
        let w = wrench_of_tensions(&pose, &r, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((w.net_force.x + alpha.cos()).abs() < 1e-15);
        assert!((w.net_force.y - (alpha.sin() - 0.981)).abs() < 1e-15);
    }

    #[test]
    fn zero_gravity_needs_no_tension() {
        let r = RigConfig { gravity: 0.0, ..rig() };
        let sol = solve_static_tensions(&Pose::new(0.2, 0.3, 0.0), &r, &PoseRate::ZERO).unwrap();
        assert!(sol.tensions.iter().all(|&t| t.abs() < 1e-15));
    }

    #[test]
    fn tie_break_keeps_lower_cord_on_platform_side() {
        let r = rig();
        // Centered pose: both triples are feasible with the lower cord idle.
        let left = solve_static_tensions(&Pose::new(0.2999, 0.35, 0.0), &r, &PoseRate::ZERO);
        let centered = solve_static_tensions(&Pose::new(0.30, 0.35, 0.0), &r, &PoseRate::ZERO).unwrap();
        assert_eq!(centered.slack, Cord::LowerLeft);
        assert!(left.is_ok());
    }

    #[test]
    fn outside_workspace_is_an_error() {
        let err = solve_static_tensions(&Pose::new(0.0, 0.35, 0.0), &rig(), &PoseRate::ZERO).unwrap_err();
        assert!(matches!(err, DynamicsError::Kinematics(KinematicsError::OutsideWorkspace { .. })));
    }

    #[test]
    fn torque_models() {
        let r = rig();
        for model in [TorqueModel::InertiaOverRadius, TorqueModel::Consistent] {
            assert_eq!(actuator_torque(0.0, 0.0, 0.0, &r, model), 0.0);
            let t = actuator_torque(2.0, 0.0, 0.6937, &r, model);
            assert!((t - 0.029_342_5).abs() < 1e-12, "{t}");
        }
        assert!((actuator_torque(0.0, 4.0, 0.0, &r, TorqueModel::InertiaOverRadius) + 0.005).abs() < 1e-15);
        assert!((actuator_torque(0.0, 4.0, 0.0, &r, TorqueModel::Consistent) - 1.25e-4).abs() < 1e-15);
        // Dry friction opposes motion in either direction and vanishes at rest.
        assert!((actuator_torque(-1.0, 0.0, 0.0, &r, TorqueModel::Consistent) + 0.011).abs() < 1e-15);
    }

    #[test]
    fn power_sums_magnitudes() {
        assert_eq!(mechanical_power(&[0.3, -0.2, 1.0, 0.0], &[0.0; 4]), 0.0);
        let p = mechanical_power(&[0.03, 0.03, 0.0, 0.0], &[2.0, 2.0, 0.0, 0.0]);
        assert!((p - 0.12).abs() < 1e-15);
        let p = mechanical_power(&[-0.03, 0.03, 0.0, 0.0], &[2.0, -2.0, 0.0, 0.0]);
        assert!((p - 0.12).abs() < 1e-15);
    }

    #[test]
    fn required_torques_hold_the_platform() {
        let r = rig();
        let pose = Pose::new(0.3, 0.35, 0.0);
        let req = required_torques(&pose, &PoseRate::ZERO, &PoseRate::ZERO, &r, TorqueModel::Consistent).unwrap();
        for k in 0..4 {
            assert!((req.torques[k] - req.tensions.tensions[k] * r.pulley_radius).abs() < 1e-15);
            assert_eq!(req.speeds[k], 0.0);
        }
    }
}
