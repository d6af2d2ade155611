//! Scenario files: flat JSON with unit-suffixed keys.
//!
//! Every length key ends in `_m` or `_cm`, every angle travels with its pose
//! triple (`_m` triples are `[m, m, rad]`, `_cm` triples are `[cm, cm, deg]`).
//! Omitted keys take the rig and scenario defaults. Unknown keys are
//! rejected, and so is giving the same quantity in two units.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use scaffold_core::{Pose, RigConfig, SimConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed scenario: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: keys `{first}` and `{second}` give the same quantity twice")]
    Conflict { path: PathBuf, first: &'static str, second: &'static str },
    #[error("{path}: key `{key}`: {reason}")]
    Invalid { path: PathBuf, key: &'static str, reason: String },
}

impl ScenarioError {
    /// Broken or unreadable file, as opposed to a well-formed file describing
    /// an invalid scenario.
    pub fn is_file_error(&self) -> bool {
        matches!(self, ScenarioError::Io { .. } | ScenarioError::Parse { .. })
    }
}

/// Gains tuned on the hardware. They act on PWM counts, not torque, so they
/// are kept for reference and only used on explicit request.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentalGains {
    pub kp: f64,
    pub ki: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub config: SimConfig,
    pub output_path: Option<PathBuf>,
    pub experimental_gains: Option<ExperimentalGains>,
}

impl Scenario {
    /// Copy running the hardware gains instead of the simulation gains.
    pub fn with_experimental_gains(&self) -> Option<Scenario> {
        let g = self.experimental_gains?;
        let mut s = self.clone();
        s.config.kp = g.kp;
        s.config.ki = g.ki;
        s.config.windup_limit = None;
        Some(s)
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,

    #[serde(skip_serializing_if = "Option::is_none")]
    stand_height_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stand_height_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stand_width_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stand_width_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    platform_height_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    platform_height_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    platform_width_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    platform_width_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    platform_mass_kg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    platform_inertia_kg_m2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pulley_radius_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pulley_radius_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pulley_inertia_kg_m2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    viscous_damping_n_m_s_per_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dry_friction_torque_n_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gravity_m_s2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cable_stiffness_n_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cable_damping_n_s_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    torque_limit_n_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speed_limit_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speed_limit_rpm: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    start_pose_m: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    start_pose_cm: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    end_pose_m: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    end_pose_cm: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cruise_speed_m_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cruise_speed_cm_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accel_m_s2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accel_cm_s2: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    kp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ki: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    windup_limit_m_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    experimental_kp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    experimental_ki: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    time_step_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    time_step_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    substeps: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    settle_time_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_path: Option<PathBuf>,
}

const CM: f64 = 0.01;
const RPM: f64 = 2.0 * PI / 60.0;
const DEG: f64 = PI / 180.0;

/// Resolves unit variants and remembers which key supplied each field, so
/// validation errors can name what the user actually wrote.
struct Resolver<'a> {
    path: &'a Path,
    used: HashMap<&'static str, &'static str>,
}

impl Resolver<'_> {
    fn scalar(
        &mut self,
        field: &'static str,
        si: (&'static str, Option<f64>),
        alt: Option<(&'static str, Option<f64>, f64)>,
        target: &mut f64,
    ) -> Result<(), ScenarioError> {
        let alt_value = alt.and_then(|(key, v, scale)| v.map(|v| (key, v * scale)));
        match (si.1, alt_value) {
            (Some(_), Some((key, _))) => {
                return Err(ScenarioError::Conflict { path: self.path.into(), first: si.0, second: key })
            }
            (Some(v), None) => {
                *target = v;
                self.used.insert(field, si.0);
            }
            (None, Some((key, v))) => {
                *target = v;
                self.used.insert(field, key);
            }
            (None, None) => {}
        }
        Ok(())
    }

    fn pose(
        &mut self,
        field: &'static str,
        si: (&'static str, Option<[f64; 3]>),
        cm: (&'static str, Option<[f64; 3]>),
        target: &mut Pose,
    ) -> Result<(), ScenarioError> {
        match (si.1, cm.1) {
            (Some(_), Some(_)) => {
                Err(ScenarioError::Conflict { path: self.path.into(), first: si.0, second: cm.0 })
            }
            (Some([x, y, th]), None) => {
                *target = Pose::new(x, y, th);
                self.used.insert(field, si.0);
                Ok(())
            }
            (None, Some([x, y, th])) => {
                *target = Pose::new(x * CM, y * CM, th * DEG);
                self.used.insert(field, cm.0);
                Ok(())
            }
            (None, None) => Ok(()),
        }
    }

    fn key_for(&self, field: &'static str) -> &'static str {
        self.used.get(field).copied().unwrap_or_else(|| default_key(field))
    }
}

/// SI key of a configuration field.
fn default_key(field: &str) -> &'static str {
    match field {
        "stand_height" => "stand_height_m",
        "stand_width" => "stand_width_m",
        "platform_height" => "platform_height_m",
        "platform_width" => "platform_width_m",
        "platform_mass" => "platform_mass_kg",
        "platform_inertia" => "platform_inertia_kg_m2",
        "pulley_radius" => "pulley_radius_m",
        "pulley_inertia" => "pulley_inertia_kg_m2",
        "viscous_damping" => "viscous_damping_n_m_s_per_rad",
        "dry_friction_torque" => "dry_friction_torque_n_m",
        "gravity" => "gravity_m_s2",
        "cable_stiffness" => "cable_stiffness_n_per_m",
        "cable_damping" => "cable_damping_n_s_per_m",
        "torque_limit" => "torque_limit_n_m",
        "speed_limit" => "speed_limit_rad_s",
        "start_pose" => "start_pose_m",
        "end_pose" => "end_pose_m",
        "cruise_speed" => "cruise_speed_m_s",
        "accel" => "accel_m_s2",
        "kp" => "kp",
        "ki" => "ki",
        "windup_limit" => "windup_limit_m_s",
        "time_step" => "time_step_s",
        "substeps" => "substeps",
        "settle_time" => "settle_time_s",
        _ => "(unknown)",
    }
}

fn resolve(file: ScenarioFile, path: &Path) -> Result<Scenario, ScenarioError> {
    let mut r = Resolver { path, used: HashMap::new() };
    let mut cfg = SimConfig::default();
    let rig = &mut cfg.rig;
    let f = &file;
    r.scalar("stand_height", ("stand_height_m", f.stand_height_m), Some(("stand_height_cm", f.stand_height_cm, CM)), &mut rig.stand_height)?;
    r.scalar("stand_width", ("stand_width_m", f.stand_width_m), Some(("stand_width_cm", f.stand_width_cm, CM)), &mut rig.stand_width)?;
    r.scalar("platform_height", ("platform_height_m", f.platform_height_m), Some(("platform_height_cm", f.platform_height_cm, CM)), &mut rig.platform_height)?;
    r.scalar("platform_width", ("platform_width_m", f.platform_width_m), Some(("platform_width_cm", f.platform_width_cm, CM)), &mut rig.platform_width)?;
    r.scalar("platform_mass", ("platform_mass_kg", f.platform_mass_kg), None, &mut rig.platform_mass)?;
    r.scalar("platform_inertia", ("platform_inertia_kg_m2", f.platform_inertia_kg_m2), None, &mut rig.platform_inertia)?;
    r.scalar("pulley_radius", ("pulley_radius_m", f.pulley_radius_m), Some(("pulley_radius_cm", f.pulley_radius_cm, CM)), &mut rig.pulley_radius)?;
    r.scalar("pulley_inertia", ("pulley_inertia_kg_m2", f.pulley_inertia_kg_m2), None, &mut rig.pulley_inertia)?;
    r.scalar("viscous_damping", ("viscous_damping_n_m_s_per_rad", f.viscous_damping_n_m_s_per_rad), None, &mut rig.viscous_damping)?;
    r.scalar("dry_friction_torque", ("dry_friction_torque_n_m", f.dry_friction_torque_n_m), None, &mut rig.dry_friction_torque)?;
    r.scalar("gravity", ("gravity_m_s2", f.gravity_m_s2), None, &mut rig.gravity)?;
    r.scalar("cable_stiffness", ("cable_stiffness_n_per_m", f.cable_stiffness_n_per_m), None, &mut rig.cable_stiffness)?;
    r.scalar("cable_damping", ("cable_damping_n_s_per_m", f.cable_damping_n_s_per_m), None, &mut rig.cable_damping)?;
    r.scalar("torque_limit", ("torque_limit_n_m", f.torque_limit_n_m), None, &mut rig.torque_limit)?;
    r.scalar("speed_limit", ("speed_limit_rad_s", f.speed_limit_rad_s), Some(("speed_limit_rpm", f.speed_limit_rpm, RPM)), &mut rig.speed_limit)?;

    r.pose("start_pose", ("start_pose_m", f.start_pose_m), ("start_pose_cm", f.start_pose_cm), &mut cfg.start)?;
    r.pose("end_pose", ("end_pose_m", f.end_pose_m), ("end_pose_cm", f.end_pose_cm), &mut cfg.end)?;
    r.scalar("cruise_speed", ("cruise_speed_m_s", f.cruise_speed_m_s), Some(("cruise_speed_cm_s", f.cruise_speed_cm_s, CM)), &mut cfg.cruise_speed)?;
    r.scalar("accel", ("accel_m_s2", f.accel_m_s2), Some(("accel_cm_s2", f.accel_cm_s2, CM)), &mut cfg.accel)?;
    r.scalar("kp", ("kp", f.kp), None, &mut cfg.kp)?;
    r.scalar("ki", ("ki", f.ki), None, &mut cfg.ki)?;
    if let Some(w) = f.windup_limit_m_s {
        cfg.windup_limit = Some(w);
    }
    r.scalar("time_step", ("time_step_s", f.time_step_s), Some(("time_step_ms", f.time_step_ms, 1e-3)), &mut cfg.time_step)?;
    r.scalar("settle_time", ("settle_time_s", f.settle_time_s), None, &mut cfg.settle_time)?;
    if let Some(n) = f.substeps {
        cfg.substeps = n;
    }

    let experimental_gains = match (f.experimental_kp, f.experimental_ki) {
        (Some(kp), Some(ki)) => Some(ExperimentalGains { kp, ki }),
        (None, None) => None,
        (Some(_), None) => {
            return Err(ScenarioError::Invalid {
                path: path.into(),
                key: "experimental_ki",
                reason: "experimental gains come as a pair".into(),
            })
        }
        (None, Some(_)) => {
            return Err(ScenarioError::Invalid {
                path: path.into(),
                key: "experimental_kp",
                reason: "experimental gains come as a pair".into(),
            })
        }
    };

    cfg.validate().map_err(|e| ScenarioError::Invalid {
        path: path.into(),
        key: r.key_for(e.field),
        reason: e.reason.into(),
    })?;

    Ok(Scenario { name: file.name, config: cfg, output_path: file.output_path, experimental_gains })
}

/// Parse and validate a scenario from JSON text. `path` only labels errors.
pub fn parse_scenario(text: &str, path: &Path) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|source| ScenarioError::Parse { path: path.into(), source })?;
    resolve(file, path)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.into(), source })?;
    parse_scenario(&text, path)
}

/// Every field written out in SI keys.
pub fn scenario_to_json(s: &Scenario) -> String {
    let c = &s.config;
    let rig: &RigConfig = &c.rig;
    let file = ScenarioFile {
        name: s.name.clone(),
        stand_height_m: Some(rig.stand_height),
        stand_width_m: Some(rig.stand_width),
        platform_height_m: Some(rig.platform_height),
        platform_width_m: Some(rig.platform_width),
        platform_mass_kg: Some(rig.platform_mass),
        platform_inertia_kg_m2: Some(rig.platform_inertia),
        pulley_radius_m: Some(rig.pulley_radius),
        pulley_inertia_kg_m2: Some(rig.pulley_inertia),
        viscous_damping_n_m_s_per_rad: Some(rig.viscous_damping),
        dry_friction_torque_n_m: Some(rig.dry_friction_torque),
        gravity_m_s2: Some(rig.gravity),
        cable_stiffness_n_per_m: Some(rig.cable_stiffness),
        cable_damping_n_s_per_m: Some(rig.cable_damping),
        torque_limit_n_m: Some(rig.torque_limit),
        speed_limit_rad_s: Some(rig.speed_limit),
        start_pose_m: Some([c.start.x, c.start.y, c.start.theta]),
        end_pose_m: Some([c.end.x, c.end.y, c.end.theta]),
        cruise_speed_m_s: Some(c.cruise_speed),
        accel_m_s2: Some(c.accel),
        kp: Some(c.kp),
        ki: Some(c.ki),
        windup_limit_m_s: c.windup_limit,
        experimental_kp: s.experimental_gains.map(|g| g.kp),
        experimental_ki: s.experimental_gains.map(|g| g.ki),
        time_step_s: Some(c.time_step),
        substeps: Some(c.substeps),
        settle_time_s: Some(c.settle_time),
        output_path: s.output_path.clone(),
        ..ScenarioFile::default()
    };
    let mut text = serde_json::to_string_pretty(&file).expect("scenario serializes");
    text.push('\n');
    text
}

pub fn save_scenario(path: &Path, s: &Scenario) -> Result<(), ScenarioError> {
    fs::write(path, scenario_to_json(s)).map_err(|source| ScenarioError::Io { path: path.into(), source })
}

/// The demonstration move and the two recorded experiments, keyed by file
/// name.
pub fn bundled_scenarios() -> Vec<(&'static str, Scenario)> {
    let hardware = Some(ExperimentalGains { kp: 0.9, ki: 0.01 });
    let demo = Scenario {
        name: Some("diagonal move (10,10) cm to (30,60) cm".into()),
        output_path: Some("sim_3_2.csv".into()),
        ..Scenario::default()
    };
    let level = Scenario {
        name: Some("test 1: level move (50,10) cm to (10,60) cm".into()),
        config: SimConfig {
            start: Pose::new(0.50, 0.10, 0.0),
            end: Pose::new(0.10, 0.60, 0.0),
            accel: 0.008,
            ..SimConfig::default()
        },
        output_path: Some("test_1.csv".into()),
        experimental_gains: hardware,
    };
    let tilt = Scenario {
        name: Some("test 2: (10,30) cm to (50,30) cm while tilting 0 to 45 deg".into()),
        config: SimConfig {
            start: Pose::new(0.10, 0.30, 0.0),
            end: Pose::new(0.50, 0.30, PI / 4.0),
            ..SimConfig::default()
        },
        output_path: Some("test_2.csv".into()),
        experimental_gains: hardware,
    };
    vec![("sim_3_2.json", demo), ("test_1.json", level), ("test_2.json", tilt)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        parse_scenario(text, Path::new("t.json"))
    }

    #[test]
    fn poses_only_gets_table_defaults() {
        let s = parse(r#"{"start_pose_cm": [10, 10, 0], "end_pose_cm": [30, 60, 0]}"#).unwrap();
        assert_eq!(s.config.rig, RigConfig::default());
        assert!((s.config.start.x - 0.10).abs() < 1e-15);
        assert!((s.config.end.y - 0.60).abs() < 1e-15);
    }

    #[test]
    fn oversized_platform_names_its_key() {
        let err = parse(r#"{"platform_height_m": 0.8}"#).unwrap_err();
        assert!(matches!(err, ScenarioError::Invalid { key: "platform_height_m", .. }), "{err}");
        assert!(err.to_string().contains("platform_height"));
        let err = parse(r#"{"platform_height_cm": 80}"#).unwrap_err();
        assert!(matches!(err, ScenarioError::Invalid { key: "platform_height_cm", .. }));
    }

    #[test]
    fn gains_kept_verbatim() {
        let s = parse(r#"{"kp": 2000, "ki": 500}"#).unwrap();
        assert_eq!((s.config.kp, s.config.ki), (2000.0, 500.0));
    }

    #[test]
    fn unknown_and_duplicate_keys_rejected() {
        let err = parse(r#"{"stand_heigth_m": 0.7}"#).unwrap_err();
        assert!(err.is_file_error());
        assert!(err.to_string().contains("stand_heigth_m"));
        let err = parse(r#"{"stand_height_m": 0.7, "stand_height_cm": 70}"#).unwrap_err();
        assert!(matches!(err, ScenarioError::Conflict { .. }));
    }

    #[test]
    fn unit_conversions() {
        let s = parse(r#"{"end_pose_cm": [50, 30, 45], "speed_limit_rpm": 60, "time_step_ms": 0.5, "accel_cm_s2": 0.8}"#)
            .unwrap();
        assert!((s.config.end.theta - PI / 4.0).abs() < 1e-15);
        assert!((s.config.rig.speed_limit - 2.0 * PI).abs() < 1e-12);
        assert!((s.config.time_step - 5e-4).abs() < 1e-18);
        assert!((s.config.accel - 0.008).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_is_exact() {
        for (_, s) in bundled_scenarios() {
            let back = parse(&scenario_to_json(&s)).unwrap();
            assert_eq!(back, s);
        }
        let odd = Scenario {
            config: SimConfig { kp: 1234.5678901234, windup_limit: Some(0.003), ..SimConfig::default() },
            ..Scenario::default()
        };
        assert_eq!(parse(&scenario_to_json(&odd)).unwrap(), odd);
    }

    #[test]
    fn experimental_gains_swap_in() {
        let (_, s) = bundled_scenarios().remove(1);
        let hw = s.with_experimental_gains().unwrap();
        assert_eq!((hw.config.kp, hw.config.ki), (0.9, 0.01));
        assert!(Scenario::default().with_experimental_gains().is_none());
    }
}
