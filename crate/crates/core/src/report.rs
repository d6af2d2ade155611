//! Tracking statistics over a telemetry series.

use thiserror::Error;

use crate::math::{abs, sqrt};
use crate::rig::{Cord, RigConfig, CORD_COUNT};
use crate::sim::TelemetryRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("telemetry is empty")]
    Empty,
    #[error("no samples in the requested time window")]
    EmptyWindow,
}

/// Tracking error summary. Length and position errors in m, θ in rad, power
/// in W.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RmsReport {
    pub samples: usize,
    pub cord_rms: [f64; CORD_COUNT],
    pub cord_max: [f64; CORD_COUNT],
    pub x_rms: f64,
    pub y_rms: f64,
    pub theta_rms: f64,
    pub x_max: f64,
    pub y_max: f64,
    pub theta_max: f64,
    pub peak_power: f64,
    pub mean_power: f64,
}

impl RmsReport {
    /// RMS of the planar position error.
    pub fn position_rms(&self) -> f64 {
        sqrt(self.x_rms * self.x_rms + self.y_rms * self.y_rms)
    }
}

/// RMS and peak errors of measured against reference, over every record.
pub fn compute_rms(records: &[TelemetryRecord]) -> Result<RmsReport, ReportError> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }
    let mut r = RmsReport { samples: records.len(), ..RmsReport::default() };
    let mut sq = [0.0; CORD_COUNT];
    let (mut sx, mut sy, mut st, mut power) = (0.0, 0.0, 0.0, 0.0);
    for rec in records {
        for k in 0..CORD_COUNT {
            let e = rec.lengths[k] - rec.lengths_ref[k];
            sq[k] += e * e;
            r.cord_max[k] = r.cord_max[k].max(abs(e));
        }
        let (ex, ey, et) = (
            rec.pose.x - rec.pose_ref.x,
            rec.pose.y - rec.pose_ref.y,
            rec.pose.theta - rec.pose_ref.theta,
        );
        sx += ex * ex;
        sy += ey * ey;
        st += et * et;
        r.x_max = r.x_max.max(abs(ex));
        r.y_max = r.y_max.max(abs(ey));
        r.theta_max = r.theta_max.max(abs(et));
        r.peak_power = r.peak_power.max(rec.power);
        power += rec.power;
    }
    let n = records.len() as f64;
    for k in 0..CORD_COUNT {
        r.cord_rms[k] = sqrt(sq[k] / n);
    }
    r.x_rms = sqrt(sx / n);
    r.y_rms = sqrt(sy / n);
    r.theta_rms = sqrt(st / n);
    r.mean_power = power / n;
    Ok(r)
}

/// Mean total power over records with `from <= t <= to`.
pub fn mean_power_between(records: &[TelemetryRecord], from: f64, to: f64) -> Result<f64, ReportError> {
    let (sum, n) = records
        .iter()
        .filter(|r| r.time >= from && r.time <= to)
        .fold((0.0, 0usize), |(s, n), r| (s + r.power, n + 1));
    if n == 0 {
        return Err(ReportError::EmptyWindow);
    }
    Ok(sum / n as f64)
}

/// Fraction of records where both lower cords carry more than `threshold`.
pub fn both_lower_taut_fraction(records: &[TelemetryRecord], threshold: f64) -> Result<f64, ReportError> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }
    let (l, r) = (Cord::LowerLeft.index(), Cord::LowerRight.index());
    let count = records
        .iter()
        .filter(|rec| rec.tensions[l] > threshold && rec.tensions[r] > threshold)
        .count();
    Ok(count as f64 / records.len() as f64)
}

/// Lower cord the half-plane rule expects to be slack: the right one while
/// the platform center is left of the stand midline, else the left one.
pub fn expected_slack_cord(x: f64, rig: &RigConfig) -> Cord {
    if x < rig.stand_width / 2.0 {
        Cord::LowerRight
    } else {
        Cord::LowerLeft
    }
}

/// Fraction of records whose less loaded lower cord is the one the half-plane
/// rule expects to be slack.
pub fn half_plane_agreement(records: &[TelemetryRecord], rig: &RigConfig) -> Result<f64, ReportError> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }
    let (l, r) = (Cord::LowerLeft.index(), Cord::LowerRight.index());
    let agree = records
        .iter()
        .filter(|rec| {
            let slack = expected_slack_cord(rec.pose.x, rig).index();
            let other = if slack == l { r } else { l };
            rec.tensions[slack] <= rec.tensions[other]
        })
        .count();
    Ok(agree as f64 / records.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rig::Pose;

    fn record(t: f64, cord_err: f64, y_err: f64, power: f64) -> TelemetryRecord {
        TelemetryRecord {
            time: t,
            pose: Pose::new(0.2, 0.3 + y_err, 0.0),
            pose_ref: Pose::new(0.2, 0.3, 0.0),
            lengths: [0.5 + cord_err; 4],
            lengths_ref: [0.5; 4],
            tensions: [1.0, 1.0, 0.5, 0.0],
            power,
            ..TelemetryRecord::default()
        }
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(compute_rms(&[]), Err(ReportError::Empty));
    }

    #[test]
    fn rms_of_alternating_error() {
        let recs = [record(0.0, 1e-3, 2e-3, 1.0), record(0.001, -1e-3, -2e-3, 3.0)];
        let r = compute_rms(&recs).unwrap();
        assert!(r.cord_rms.iter().all(|&v| (v - 1e-3).abs() < 1e-15));
        assert!((r.y_rms - 2e-3).abs() < 1e-15);
        assert_eq!(r.x_rms, 0.0);
        assert!((r.cord_max[2] - 1e-3).abs() < 1e-15);
        assert_eq!(r.peak_power, 3.0);
        assert_eq!(r.mean_power, 2.0);
        assert_eq!(mean_power_between(&recs, 0.0005, 1.0), Ok(3.0));
        assert_eq!(mean_power_between(&recs, 2.0, 3.0), Err(ReportError::EmptyWindow));
    }

    #[test]
    fn lower_cord_statistics() {
        let rig = RigConfig::default();
        let recs = [record(0.0, 0.0, 0.0, 0.0)];
        assert_eq!(both_lower_taut_fraction(&recs, 0.05), Ok(0.0));
        assert_eq!(half_plane_agreement(&recs, &rig), Ok(1.0));
        assert_eq!(expected_slack_cord(0.4, &rig), Cord::LowerLeft);
    }
}
