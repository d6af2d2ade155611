use scaffold_core::sim::{derivatives, DIAGNOSTIC_TAIL};
use scaffold_core::*;

fn hold_torques(state: &SimState) -> [f64; 4] {
    core::array::from_fn(|k| state.motors[k].commanded_torque)
}

#[test]
fn single_cord_moment_sign() {
    let cfg = SimConfig::default();
    let rig = cfg.rig;
    for pose in [Pose::new(0.10, 0.10, 0.0), Pose::new(0.4, 0.3, 0.2), Pose::new(0.25, 0.5, -0.15)] {
        let sim = Simulator::new(&SimConfig { start: pose, end: pose, ..cfg }).unwrap();
        let mut state = sim.state();
        let lengths = inverse_kinematics(&pose, &rig).unwrap();
        // Cord 1 stretched by 0.1 mm, the rest slack.
        for k in 0..4 {
            state.motors[k].released_length = lengths[k] + if k == 0 { -1e-4 } else { 1e-3 };
        }
        let d = derivatives(&state, &[0.0; 4], &rig).unwrap();
        assert!(d.tensions[0] > 0.0 && d.tensions[1..].iter().all(|&t| t == 0.0));
        let w = wrench_of_tensions(&pose, &rig, &d.tensions).unwrap();
        assert_eq!(d.acceleration.theta.signum(), w.net_moment.signum());
        assert!((d.acceleration.theta - w.net_moment / rig.platform_inertia).abs() < 1e-9);
        assert!((d.acceleration.x - w.net_force.x / rig.platform_mass).abs() < 1e-9);
    }
}

#[test]
fn motor_acceleration_balances_its_loads() {
    let cfg = SimConfig::default();
    let sim = Simulator::new(&cfg).unwrap();
    let mut state = sim.state();
    state.motors[2].shaft_speed = 3.0;
    let mut torques = hold_torques(&state);
    torques[2] += 0.05;
    let d = derivatives(&state, &torques, &cfg.rig).unwrap();
    let rig = cfg.rig;
    let expect = (torques[2] - rig.dry_friction_torque - 3.0 * rig.viscous_damping
        - d.tensions[2] * rig.pulley_radius)
        / rig.pulley_inertia;
    assert!((d.shaft_accels[2] - expect).abs() < 1e-9 * expect.abs().max(1.0));
    assert_eq!(d.shaft_speeds[2], 3.0);
}

#[test]
fn zero_motion_holds_position() {
    for start in [Pose::new(0.10, 0.10, 0.0), Pose::new(0.3, 0.35, 0.0), Pose::new(0.45, 0.55, 0.1)] {
        let cfg = SimConfig { start, end: start, ..SimConfig::default() };
        let records = run(&cfg).unwrap();
        assert_eq!(records.len(), 2000);
        for r in &records {
            let dev = ((r.pose.x - start.x).powi(2) + (r.pose.y - start.y).powi(2)).sqrt();
            assert!(dev < 5e-4, "{dev} at t = {}", r.time);
            assert!(r.tensions.iter().all(|&t| t >= 0.0));
        }
    }
}

#[test]
fn runs_are_bit_identical() {
    let cfg = SimConfig {
        end: Pose::new(0.2, 0.2, 0.05),
        settle_time: 0.2,
        ..SimConfig::default()
    };
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(format!("{x:?}"), format!("{y:?}"));
    }
}

#[test]
fn underpowered_winches_drop_the_platform() {
    // Holding needs over 0.01 N·m on the loaded upper winch.
    let mut cfg = SimConfig::default();
    cfg.rig.torque_limit = 0.001;
    cfg.rig.dry_friction_torque = 0.0;
    match run(&cfg) {
        Err(SimError::Unstable { tail, time, reason }) => {
            assert_eq!(reason, "platform left the stand");
            assert!(!tail.is_empty() && tail.len() <= DIAGNOSTIC_TAIL);
            assert!(tail.last().unwrap().time <= time);
            assert!(tail.last().unwrap().pose.y < 0.1);
        }
        other => panic!("expected an instability abort, got {:?}", other.map(|r| r.len())),
    }
}

#[test]
fn single_rate_control_degrades_tracking() {
    let fast = compute_rms(&run(&SimConfig::default()).unwrap()).unwrap();
    let slow = compute_rms(&run(&SimConfig { substeps: 1, ..SimConfig::default() }).unwrap()).unwrap();
    for k in 0..4 {
        assert!(slow.cord_rms[k] > 10.0 * fast.cord_rms[k], "cord {}", k + 1);
    }
}

#[test]
fn invalid_scenarios_are_rejected() {
    let cfg = SimConfig { time_step: 0.0, ..SimConfig::default() };
    assert!(matches!(run(&cfg), Err(SimError::Config(e)) if e.field == "time_step"));
    let cfg = SimConfig { end: Pose::new(0.7, 0.3, 0.0), ..SimConfig::default() };
    assert!(matches!(run(&cfg), Err(SimError::Config(e)) if e.field == "end_pose"));
}
