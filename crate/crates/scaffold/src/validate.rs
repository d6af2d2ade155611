//! Built-in quick checks run by `validate`.

use scaffold_core::dynamics::TorqueModel;
use scaffold_core::*;

use crate::scenario::{bundled_scenarios, parse_scenario, scenario_to_json};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn sample_poses() -> Vec<Pose> {
    let mut poses = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let x = 0.15 + 0.075 * i as f64;
            let y = 0.12 + 0.11 * j as f64;
            poses.push(Pose::new(x, y, 0.04 * (i as f64 - j as f64)));
        }
    }
    poses
}

pub fn mobility() -> i32 {
    validate_mobility(&RigConfig::default())
}

pub fn quick_suite() -> Vec<Check> {
    let rig = RigConfig::default();
    let mut out = Vec::new();

    let dof = mobility();
    out.push(check("mobility", dof == 0, format!("{dof} net degrees of freedom")));

    out.push(check("default rig", rig.validate().is_ok(), "table values pass all invariants".into()));

    let bad: Vec<_> = bundled_scenarios()
        .into_iter()
        .filter(|(file, s)| {
            s.config.validate().is_err()
                || parse_scenario(&scenario_to_json(s), file.as_ref()).ok().as_ref() != Some(s)
        })
        .map(|(file, _)| file)
        .collect();
    out.push(check("bundled scenarios", bad.is_empty(), if bad.is_empty() { "all valid and round-tripping".to_string() } else { format!("invalid or not round-tripping: {bad:?}") }));

    let mut worst_fk = 0.0f64;
    let mut worst_wrench = 0.0f64;
    let mut failures = 0;
    for pose in sample_poses() {
        let Ok(sol) = solve_static_tensions(&pose, &rig, &PoseRate::ZERO) else {
            failures += 1;
            continue;
        };
        let w = wrench_of_tensions(&pose, &rig, &sol.tensions).expect("pose inside workspace");
        worst_wrench = worst_wrench.max(w.net_force.norm()).max(w.net_moment.abs());
        let l = inverse_kinematics(&pose, &rig).expect("pose inside workspace");
        let target = sol.taut.map(|c| l[c.index()]);
        let guess = Pose::new(pose.x + 5e-4, pose.y - 5e-4, pose.theta + 2e-3);
        match forward_kinematics(sol.taut, target, &rig, guess) {
            Ok(p) => {
                worst_fk = worst_fk.max((p.x - pose.x).abs()).max((p.y - pose.y).abs()).max((p.theta - pose.theta).abs())
            }
            Err(_) => failures += 1,
        }
    }
    out.push(check(
        "inverse/forward kinematics",
        failures == 0 && worst_fk < 1e-9,
        format!("worst round-trip error {worst_fk:.2e}, {failures} failures"),
    ));
    out.push(check("static equilibrium", worst_wrench < 1e-9, format!("worst wrench residual {worst_wrench:.2e}")));

    let center = Pose::new(rig.stand_width / 2.0, 0.35, 0.0);
    let alpha = cord_geometry(&center, &rig, Cord::UpperLeft).map(|c| c.angle).unwrap_or(f64::NAN);
    let want = rig.platform_mass * rig.gravity / (2.0 * alpha.sin());
    let got = solve_static_tensions(&center, &rig, &PoseRate::ZERO).map(|s| s.tensions[0]).unwrap_or(f64::NAN);
    out.push(check("symmetric tension", (got - want).abs() < 1e-9, format!("{got:.9} N vs {want:.9} N")));

    let demo = SimConfig::default();
    let p = plan_move(&demo.start, &demo.end, demo.cruise_speed, demo.accel, &rig);
    let integral = 0.5 * p.t_accel * p.peak_speed() * 2.0 + p.peak_speed() * p.t_cruise;
    out.push(check(
        "trapezoid profile",
        (p.total_time - 11.270_329_614_269).abs() < 1e-9 && (integral - p.path_length).abs() < 1e-12,
        format!("total {:.4} s over {:.5} m", p.total_time, p.path_length),
    ));

    let t = cable_tension(0.5001, 0.5, 0.0, 0.0, &rig);
    out.push(check(
        "cable tension",
        (t - 1.0).abs() < 1e-9 && cable_tension(0.49, 0.5, 1.0, 0.0, &rig) == 0.0,
        format!("1e-4 m stretch gives {t:.6} N"),
    ));

    let tau = actuator_torque(2.0, 0.0, 0.6937, &rig, TorqueModel::Consistent);
    out.push(check("motor torque", (tau - 0.0293425).abs() < 1e-9, format!("{tau:.7} N·m")));

    let gains = PiGains::new(demo.kp, demo.ki, rig.torque_limit);
    let (u0, _) = pi_step(&PiState::new(gains), 0.0, 1e-3, rig.torque_limit);
    let (us, _) = pi_step(&PiState::new(gains), 0.01, 1e-3, rig.torque_limit);
    out.push(check("PI controller", u0 == 0.0 && us == rig.torque_limit, format!("saturates at {us} N·m")));

    out
}
