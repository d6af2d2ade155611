//! Trapezoidal task-space reference generation and the per-cord reference
//! length series derived from it.
//!
//! The platform center moves on a straight line between two poses; θ is
//! interpolated with the same normalized profile, so rotation starts and
//! stops together with translation. A pure rotation uses `|Δθ|` times the
//! platform half-diagonal as its profile distance.

use alloc::vec::Vec;

use thiserror::Error;

use crate::kinematics::{self, KinematicsError};
use crate::math::{abs, floor, sqrt};
use crate::rig::{Cord, Pose, PoseRate, RigConfig, SimConfig, CORD_COUNT};

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum TrajectoryError {
    #[error("time {t} s is outside the profile [0, {total}] s")]
    TimeOutOfRange { t: f64, total: f64 },
    #[error("reference pose {pose:?} at t = {time} s is outside the workspace")]
    OutsideWorkspace { time: f64, pose: Pose },
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// Speed-versus-time profile with equal acceleration and deceleration ramps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapezoidalProfile {
    /// m.
    pub path_length: f64,
    /// m/s.
    pub cruise_speed: f64,
    /// m/s².
    pub accel: f64,
    /// Duration of each ramp, s.
    pub t_accel: f64,
    /// s.
    pub t_cruise: f64,
    /// s.
    pub total_time: f64,
    /// Cruise speed is never reached.
    pub triangular: bool,
}

/// Plan a rest-to-rest profile over `distance`.
pub fn plan_profile(distance: f64, cruise_speed: f64, accel: f64) -> TrapezoidalProfile {
    let distance = distance.max(0.0);
    let (t_accel, t_cruise, triangular) = if distance == 0.0 {
        (0.0, 0.0, false)
    } else if distance < cruise_speed * cruise_speed / accel {
        (sqrt(distance / accel), 0.0, true)
    } else {
        let t_accel = cruise_speed / accel;
        (t_accel, (distance - cruise_speed * t_accel) / cruise_speed, false)
    };
    TrapezoidalProfile {
        path_length: distance,
        cruise_speed,
        accel,
        t_accel,
        t_cruise,
        total_time: 2.0 * t_accel + t_cruise,
        triangular,
    }
}

impl TrapezoidalProfile {
    pub fn peak_speed(&self) -> f64 {
        self.accel * self.t_accel
    }

    fn clamp(&self, t: f64) -> f64 {
        t.max(0.0).min(self.total_time)
    }

    /// Arc length travelled by time `t` (clamped to the profile).
    pub fn distance_at(&self, t: f64) -> f64 {
        let t = self.clamp(t);
        let ramp_end = self.t_accel;
        let cruise_end = self.t_accel + self.t_cruise;
        if t <= ramp_end {
            0.5 * self.accel * t * t
        } else if t <= cruise_end {
            0.5 * self.accel * ramp_end * ramp_end + self.peak_speed() * (t - ramp_end)
        } else {
            let remaining = self.total_time - t;
            self.path_length - 0.5 * self.accel * remaining * remaining
        }
    }

    pub fn speed_at(&self, t: f64) -> f64 {
        let t = self.clamp(t);
        if t <= self.t_accel {
            self.accel * t
        } else if t <= self.t_accel + self.t_cruise {
            self.peak_speed()
        } else {
            self.accel * (self.total_time - t)
        }
    }

    pub fn accel_at(&self, t: f64) -> f64 {
        if self.total_time == 0.0 || t <= 0.0 || t >= self.total_time {
            0.0
        } else if t < self.t_accel {
            self.accel
        } else if t <= self.t_accel + self.t_cruise {
            0.0
        } else {
            -self.accel
        }
    }
}

/// Profile distance for a move between two poses.
pub fn move_distance(start: &Pose, end: &Pose, rig: &RigConfig) -> f64 {
    let translation = (end.position() - start.position()).norm();
    if translation > 0.0 {
        translation
    } else {
        abs(end.theta - start.theta) * rig.half_diagonal()
    }
}

/// Plan the profile for a move between two poses.
pub fn plan_move(start: &Pose, end: &Pose, cruise_speed: f64, accel: f64, rig: &RigConfig) -> TrapezoidalProfile {
    plan_profile(move_distance(start, end, rig), cruise_speed, accel)
}

/// Reference pose with its first and second derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReferenceSample {
    pub pose: Pose,
    pub rate: PoseRate,
    pub accel: PoseRate,
}

/// Reference pose at time `t` on the straight-line move from `start` to `end`.
pub fn pose_at(
    profile: &TrapezoidalProfile,
    start: &Pose,
    end: &Pose,
    t: f64,
) -> Result<ReferenceSample, TrajectoryError> {
    if !(t >= 0.0 && t <= profile.total_time) {
        return Err(TrajectoryError::TimeOutOfRange { t, total: profile.total_time });
    }
    if profile.path_length == 0.0 {
        return Ok(ReferenceSample { pose: *start, ..ReferenceSample::default() });
    }
    let scale = 1.0 / profile.path_length;
    let f = profile.distance_at(t) * scale;
    let fd = profile.speed_at(t) * scale;
    let fdd = profile.accel_at(t) * scale;
    let (dx, dy, dth) = (end.x - start.x, end.y - start.y, end.theta - start.theta);
    Ok(ReferenceSample {
        pose: Pose::new(start.x + f * dx, start.y + f * dy, start.theta + f * dth),
        rate: PoseRate::new(fd * dx, fd * dy, fd * dth),
        accel: PoseRate::new(fdd * dx, fdd * dy, fdd * dth),
    })
}

/// Sample times `0, dt, 2dt, …` plus the exact final time.
pub fn time_grid(total_time: f64, dt: f64) -> Vec<f64> {
    let steps = floor(total_time / dt + 1e-9) as usize;
    let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let last = steps as f64 * dt;
    if total_time - last > 1e-12 * total_time.max(1.0) {
        times.push(total_time);
    } else if let Some(t) = times.last_mut() {
        *t = total_time.max(0.0);
    }
    times
}

/// Sampled reference trajectory for a whole move.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceSeries {
    pub profile: TrapezoidalProfile,
    pub times: Vec<f64>,
    pub poses: Vec<Pose>,
    pub pose_rates: Vec<PoseRate>,
    /// Reference cord lengths, m.
    pub lengths: Vec<[f64; CORD_COUNT]>,
    /// Reference cord rates, m/s.
    pub rates: Vec<[f64; CORD_COUNT]>,
}

/// Reference lengths and rates of all four cords along a configured move,
/// sampled on the telemetry step.
pub fn reference_series(config: &SimConfig) -> Result<ReferenceSeries, TrajectoryError> {
    let rig = &config.rig;
    let profile = plan_move(&config.start, &config.end, config.cruise_speed, config.accel, rig);
    let times = time_grid(profile.total_time, config.time_step);
    let mut series = ReferenceSeries {
        profile,
        poses: Vec::with_capacity(times.len()),
        pose_rates: Vec::with_capacity(times.len()),
        lengths: Vec::with_capacity(times.len()),
        rates: Vec::with_capacity(times.len()),
        times,
    };
    for &t in &series.times {
        let sample = pose_at(&profile, &config.start, &config.end, t)?;
        if !kinematics::in_workspace(&sample.pose, rig) {
            return Err(TrajectoryError::OutsideWorkspace { time: t, pose: sample.pose });
        }
        let mut lengths = [0.0; CORD_COUNT];
        let mut rates = [0.0; CORD_COUNT];
        for cord in Cord::ALL {
            let m = kinematics::cord_rates(&sample.pose, &sample.rate, &PoseRate::ZERO, rig, cord)?;
            lengths[cord.index()] = m.length;
            rates[cord.index()] = m.rate;
        }
        series.poses.push(sample.pose);
        series.pose_rates.push(sample.rate);
        series.lengths.push(lengths);
        series.rates.push(rates);
    }
    Ok(series)
}
