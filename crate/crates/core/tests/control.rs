use proptest::prelude::*;
use scaffold_core::*;

const LIMIT: f64 = 2.0;

fn run_loop(gains: PiGains, errors: &[f64], dt: f64) -> (Vec<f64>, PiState) {
    let mut state = PiState::new(gains);
    let mut out = Vec::with_capacity(errors.len());
    for &e in errors {
        let (u, next) = pi_step(&state, e, dt, LIMIT);
        out.push(u);
        state = next;
    }
    (out, state)
}

proptest! {
    #[test]
    fn linear_below_saturation(
        a in prop::collection::vec(-1e-4..1e-4f64, 1..50),
        scale in -2.0..2.0f64,
        kp in 0.0..5000.0f64,
        ki in 0.0..2000.0f64,
    ) {
        let gains = PiGains::new(kp, ki, LIMIT);
        let dt = 1e-3;
        let (ua, _) = run_loop(gains, &a, dt);
        let scaled: Vec<f64> = a.iter().map(|e| e * scale).collect();
        let (us, _) = run_loop(gains, &scaled, dt);
        let mut integral = 0.0;
        for i in 0..a.len() {
            // Command uses the integral before this step's update.
            let expect = kp * a[i] + ki * integral;
            prop_assert!((ua[i] - expect).abs() < 1e-12);
            prop_assert!((us[i] - scale * ua[i]).abs() < 1e-12);
            integral += a[i] * dt;
        }
    }

    #[test]
    fn output_and_integral_stay_bounded(
        errors in prop::collection::vec(-1.0..1.0f64, 1..400),
        kp in 0.0..5000.0f64,
        ki in 1.0..2000.0f64,
    ) {
        let gains = PiGains::new(kp, ki, LIMIT);
        let mut state = PiState::new(gains);
        for &e in &errors {
            let (u, next) = pi_step(&state, e, 1e-3, LIMIT);
            prop_assert!(u.abs() <= LIMIT);
            prop_assert!(next.integral.abs() <= gains.windup_limit);
            state = next;
        }
    }
}

#[test]
fn anti_windup_shortens_recovery() {
    // Hold a large error long enough to saturate, then reverse it.
    let gains = PiGains::new(2000.0, 500.0, LIMIT);
    let mut errors = vec![0.01; 2000];
    errors.extend(vec![-1e-4; 3000]);
    let (u, state) = run_loop(gains, &errors, 1e-3);
    assert!(u[..2000].iter().all(|&x| x == LIMIT));
    // Frozen while saturated, so only the first unsaturated steps count.
    let recovered = u[2000..].iter().position(|&x| x < 0.0).unwrap();
    assert!(recovered < 10, "took {recovered} steps");
    assert!(state.integral.abs() <= gains.windup_limit);
}
