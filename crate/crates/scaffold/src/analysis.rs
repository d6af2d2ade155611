//! Report assembly and formatting for `analyze`.

use scaffold_core::report::{both_lower_taut_fraction, half_plane_agreement};
use scaffold_core::{compute_rms, ReportError, RigConfig, TelemetryRecord};
use serde::Serialize;

/// Lower-cord tension above which a cord counts as loaded, N.
pub const LOADED_TENSION: f64 = 0.05;

/// Peak power quoted for the physical rig, W. Printed for comparison only.
pub const PUBLISHED_PEAK_POWER: f64 = 35.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Analysis {
    pub samples: usize,
    pub duration_s: f64,
    pub cord_rms_m: [f64; 4],
    pub cord_max_m: [f64; 4],
    pub x_rms_m: f64,
    pub y_rms_m: f64,
    pub theta_rms_rad: f64,
    pub x_max_m: f64,
    pub y_max_m: f64,
    pub theta_max_rad: f64,
    pub peak_power_w: f64,
    pub mean_power_w: f64,
    /// Share of samples with both lower cords loaded.
    pub both_lower_loaded: f64,
    /// Share of samples where the less loaded lower cord is on the side
    /// opposite the platform.
    pub half_plane_agreement: f64,
}

pub fn analyze(records: &[TelemetryRecord], rig: &RigConfig) -> Result<Analysis, ReportError> {
    let r = compute_rms(records)?;
    Ok(Analysis {
        samples: r.samples,
        duration_s: records.last().map_or(0.0, |x| x.time),
        cord_rms_m: r.cord_rms,
        cord_max_m: r.cord_max,
        x_rms_m: r.x_rms,
        y_rms_m: r.y_rms,
        theta_rms_rad: r.theta_rms,
        x_max_m: r.x_max,
        y_max_m: r.y_max,
        theta_max_rad: r.theta_max,
        peak_power_w: r.peak_power,
        mean_power_w: r.mean_power,
        both_lower_loaded: both_lower_taut_fraction(records, LOADED_TENSION)?,
        half_plane_agreement: half_plane_agreement(records, rig)?,
    })
}

pub fn format_table(a: &Analysis) -> String {
    let mut s = String::new();
    s.push_str(&format!("samples          {} ({:.3} s)\n", a.samples, a.duration_s));
    s.push_str("channel          RMS           max\n");
    for k in 0..4 {
        s.push_str(&format!("cord {}  [m]     {:<13.4e} {:.4e}\n", k + 1, a.cord_rms_m[k], a.cord_max_m[k]));
    }
    s.push_str(&format!("x       [m]     {:<13.4e} {:.4e}\n", a.x_rms_m, a.x_max_m));
    s.push_str(&format!("y       [m]     {:<13.4e} {:.4e}\n", a.y_rms_m, a.y_max_m));
    s.push_str(&format!("theta   [rad]   {:<13.4e} {:.4e}\n", a.theta_rms_rad, a.theta_max_rad));
    s.push_str(&format!(
        "power   [W]     mean {:.4} peak {:.4} (published peak {PUBLISHED_PEAK_POWER} W)\n",
        a.mean_power_w, a.peak_power_w
    ));
    s.push_str(&format!("both lower cords loaded  {:.2} %\n", 100.0 * a.both_lower_loaded));
    s.push_str(&format!("half-plane slack rule    {:.2} % agreement\n", 100.0 * a.half_plane_agreement));
    s
}
