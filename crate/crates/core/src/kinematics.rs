//! Platform corner kinematics, cord lengths and their derivatives, pulley
//! mappings, and forward kinematics from three cord lengths.
//!
//! Every cord uses the same anchor-relative form: `Lᵢ = ‖anchorᵢ − cornerᵢ‖`,
//! with rates and accelerations by the chain rule. For cord 1 these reduce
//! term for term to the printed corner-1 expressions (checked in the tests).

use thiserror::Error;

use crate::linalg;
use crate::math::atan2;
use crate::rig::{Cord, CordState, Pose, PoseRate, RigConfig, CORD_COUNT};
use crate::vec2::Vec2;

/// Corners must stay this far inside the stand rectangle, m.
pub const WORKSPACE_MARGIN: f64 = 0.005;

/// Cord rates are refused below this length, m.
pub const MIN_CORD_LENGTH: f64 = 1e-6;

const FK_MAX_ITERATIONS: usize = 50;
const FK_TOLERANCE: f64 = 1e-12;
const FK_MAX_CONDITION: f64 = 1e8;
const FK_MAX_HALVINGS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum KinematicsError {
    #[error("cord {} corner coincides with its anchor", .cord.number())]
    Degenerate { cord: Cord },
    #[error("cord {} length {length} m is too short for rate evaluation", .cord.number())]
    Singular { cord: Cord, length: f64 },
    #[error("pose {pose:?} is outside the workspace")]
    OutsideWorkspace { pose: Pose },
    #[error("cord {} target length must be finite and positive", .cord.number())]
    InvalidLength { cord: Cord },
    #[error("forward kinematics did not converge after {iterations} iterations (residual {residual:e} m)")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("cord Jacobian is near-singular (condition number {condition:e})")]
    IllConditioned { condition: f64 },
}

/// Position, velocity and acceleration of one platform corner.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CornerKinematics {
    pub position: Vec2,
    pub velocity: Vec2,
    pub acceleration: Vec2,
}

/// Length, rate and acceleration of one cord.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CordMotion {
    pub length: f64,
    pub rate: f64,
    pub acceleration: f64,
}

/// `∂Lᵢ/∂(Px, Py, θ)` for all four cords.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CordJacobian(pub [[f64; 3]; CORD_COUNT]);

impl CordJacobian {
    pub fn row(&self, cord: Cord) -> [f64; 3] {
        self.0[cord.index()]
    }
}

fn corner_offset(pose: &Pose, rig: &RigConfig, cord: Cord) -> Vec2 {
    cord.local_corner(rig).rotated(pose.theta)
}

/// Corner position in the stand frame.
pub fn corner_position(pose: &Pose, rig: &RigConfig, cord: Cord) -> Vec2 {
    pose.position() + corner_offset(pose, rig, cord)
}

/// Corner position with its first and second time derivatives.
pub fn corner_derivatives(
    pose: &Pose,
    rate: &PoseRate,
    accel: &PoseRate,
    rig: &RigConfig,
    cord: Cord,
) -> CornerKinematics {
    let offset = corner_offset(pose, rig, cord);
    let tangent = offset.perp();
    CornerKinematics {
        position: pose.position() + offset,
        velocity: rate.linear() + rate.theta * tangent,
        acceleration: accel.linear() + accel.theta * tangent
            - (rate.theta * rate.theta) * offset,
    }
}

/// Cord length and direction angle. Rate, tension and slack are left at zero.
///
/// The angle is measured against the x-axis with a quadrant-correct
/// arctangent, mirrored so that every cord's angle is acute for a platform
/// well inside the stand.
pub fn cord_geometry(pose: &Pose, rig: &RigConfig, cord: Cord) -> Result<CordState, KinematicsError> {
    let span = rig.anchor(cord) - corner_position(pose, rig, cord);
    let length = span.norm();
    if !(length > 1e-12) {
        return Err(KinematicsError::Degenerate { cord });
    }
    let sx = if cord.is_left() { -1.0 } else { 1.0 };
    let sy = if cord.is_upper() { 1.0 } else { -1.0 };
    Ok(CordState {
        length,
        angle: atan2(sy * span.y, sx * span.x),
        ..CordState::default()
    })
}

/// Unit vector from the platform corner toward the anchor.
pub(crate) fn cord_direction(pose: &Pose, rig: &RigConfig, cord: Cord) -> Result<(Vec2, f64), KinematicsError> {
    let span = rig.anchor(cord) - corner_position(pose, rig, cord);
    let length = span.norm();
    if !(length > 1e-12) {
        return Err(KinematicsError::Degenerate { cord });
    }
    Ok(((1.0 / length) * span, length))
}

/// Cord length, rate and acceleration for a moving platform.
pub fn cord_rates(
    pose: &Pose,
    rate: &PoseRate,
    accel: &PoseRate,
    rig: &RigConfig,
    cord: Cord,
) -> Result<CordMotion, KinematicsError> {
    let corner = corner_derivatives(pose, rate, accel, rig, cord);
    let span = rig.anchor(cord) - corner.position;
    let length = span.norm();
    if !(length > MIN_CORD_LENGTH) {
        return Err(KinematicsError::Singular { cord, length });
    }
    let rate = -span.dot(corner.velocity) / length;
    let acceleration = (corner.velocity.dot(corner.velocity) - span.dot(corner.acceleration)
        - rate * rate)
        / length;
    Ok(CordMotion { length, rate, acceleration })
}

/// Motor shaft speed and acceleration from cord rate and acceleration.
/// Positive speed winds cable in.
pub fn pulley_map(cord_rate: f64, cord_accel: f64, rig: &RigConfig) -> (f64, f64) {
    (-cord_rate / rig.pulley_radius, -cord_accel / rig.pulley_radius)
}

/// True when all four corners are at least [`WORKSPACE_MARGIN`] inside the
/// stand rectangle.
pub fn in_workspace(pose: &Pose, rig: &RigConfig) -> bool {
    Cord::ALL.iter().all(|&cord| {
        let p = corner_position(pose, rig, cord);
        p.x >= WORKSPACE_MARGIN
            && p.x <= rig.stand_width - WORKSPACE_MARGIN
            && p.y >= WORKSPACE_MARGIN
            && p.y <= rig.stand_height - WORKSPACE_MARGIN
    })
}

fn cord_lengths(pose: &Pose, rig: &RigConfig) -> Result<[f64; CORD_COUNT], KinematicsError> {
    let mut lengths = [0.0; CORD_COUNT];
    for cord in Cord::ALL {
        lengths[cord.index()] = cord_geometry(pose, rig, cord)?.length;
    }
    Ok(lengths)
}

/// Reference cord lengths for a pose.
pub fn inverse_kinematics(pose: &Pose, rig: &RigConfig) -> Result<[f64; CORD_COUNT], KinematicsError> {
    if !in_workspace(pose, rig) {
        return Err(KinematicsError::OutsideWorkspace { pose: *pose });
    }
    cord_lengths(pose, rig)
}

/// Cord length gradients. The translational part of each row is minus the
/// cord's unit direction.
pub fn cord_jacobian(pose: &Pose, rig: &RigConfig) -> Result<CordJacobian, KinematicsError> {
    let mut rows = [[0.0; 3]; CORD_COUNT];
    for cord in Cord::ALL {
        rows[cord.index()] = jacobian_row(pose, rig, cord)?;
    }
    Ok(CordJacobian(rows))
}

fn jacobian_row(pose: &Pose, rig: &RigConfig, cord: Cord) -> Result<[f64; 3], KinematicsError> {
    let (u, _) = cord_direction(pose, rig, cord)?;
    let tangent = corner_offset(pose, rig, cord).perp();
    Ok([-u.x, -u.y, -u.dot(tangent)])
}

fn residual(
    pose: &Pose,
    rig: &RigConfig,
    cords: &[Cord; 3],
    targets: &[f64; 3],
) -> Result<([f64; 3], f64), KinematicsError> {
    let mut r = [0.0; 3];
    for k in 0..3 {
        r[k] = cord_geometry(pose, rig, cords[k])?.length - targets[k];
    }
    let norm = crate::math::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    Ok((r, norm))
}

/// Pose reproducing three prescribed cord lengths, by damped Newton iteration
/// from `guess`.
pub fn forward_kinematics(
    cords: [Cord; 3],
    lengths: [f64; 3],
    rig: &RigConfig,
    guess: Pose,
) -> Result<Pose, KinematicsError> {
    for k in 0..3 {
        if !(lengths[k].is_finite() && lengths[k] > 0.0) {
            return Err(KinematicsError::InvalidLength { cord: cords[k] });
        }
    }
    let mut pose = guess;
    let (mut r, mut norm) = residual(&pose, rig, &cords, &lengths)?;
    for iteration in 0..FK_MAX_ITERATIONS {
        if norm < FK_TOLERANCE {
            return Ok(pose);
        }
        let mut jac = [[0.0; 3]; 3];
        for k in 0..3 {
            jac[k] = jacobian_row(&pose, rig, cords[k])?;
        }
        let Some((step, condition)) = linalg::solve(&jac, &[-r[0], -r[1], -r[2]]) else {
            return Err(KinematicsError::IllConditioned { condition: f64::INFINITY });
        };
        if condition > FK_MAX_CONDITION {
            return Err(KinematicsError::IllConditioned { condition });
        }
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..FK_MAX_HALVINGS {
            let trial = Pose::new(
                pose.x + scale * step[0],
                pose.y + scale * step[1],
                pose.theta + scale * step[2],
            );
            if let Ok((tr, tn)) = residual(&trial, rig, &cords, &lengths) {
                if tn < norm {
                    pose = trial;
                    r = tr;
                    norm = tn;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(KinematicsError::NoConvergence { iterations: iteration + 1, residual: norm });
        }
    }
    if norm < FK_TOLERANCE {
        Ok(pose)
    } else {
        Err(KinematicsError::NoConvergence { iterations: FK_MAX_ITERATIONS, residual: norm })
    }
}
