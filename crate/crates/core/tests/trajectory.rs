use proptest::prelude::*;
use scaffold_core::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn speed_integrates_to_distance(
        distance in prop_oneof![Just(0.0), 1e-4..0.02f64, 0.02..1.0f64],
        cruise in 0.01..0.2f64,
        accel in 0.01..1.0f64,
    ) {
        let p = plan_profile(distance, cruise, accel);
        prop_assert_eq!(p.triangular, distance > 0.0 && distance < cruise * cruise / accel);
        prop_assert!(p.peak_speed() <= cruise * (1.0 + 1e-12));
        // Speed is piecewise linear, so the trapezoid rule on the breakpoints
        // is exact.
        let knots = [0.0, p.t_accel, p.t_accel + p.t_cruise, p.total_time];
        let integral: f64 = knots
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (p.speed_at(w[0]) + p.speed_at(w[1])))
            .sum();
        prop_assert!((integral - distance).abs() <= 1e-9 * distance.max(1e-12), "{integral} vs {distance}");
        prop_assert!((p.distance_at(p.total_time) - distance).abs() <= 1e-12);
        prop_assert_eq!(p.speed_at(0.0), 0.0);
        prop_assert!(p.speed_at(p.total_time).abs() <= 1e-12);
    }

    #[test]
    fn distance_is_monotone_and_consistent(
        distance in 1e-3..1.0f64,
        cruise in 0.01..0.2f64,
        accel in 0.01..1.0f64,
    ) {
        let p = plan_profile(distance, cruise, accel);
        let n = 400;
        let h = p.total_time / n as f64;
        let mut prev = 0.0;
        for i in 1..=n {
            let t = i as f64 * h;
            let d = p.distance_at(t);
            prop_assert!(d >= prev - 1e-15);
            // Midpoint rule against the analytic distance, per interval.
            let mid = p.speed_at(t - h / 2.0) * h;
            prop_assert!((d - prev - mid).abs() <= p.accel * h * h);
            prev = d;
        }
    }
}

#[test]
fn reference_lengths_of_the_demo_move() {
    let s = reference_series(&SimConfig::default()).unwrap();
    let first = s.lengths.first().unwrap()[0];
    let last = s.lengths.last().unwrap()[0];
    assert!((first - 0.5864).abs() < 1e-3, "{first}");
    assert!((last - 0.2371).abs() < 1e-3, "{last}");
    assert_eq!(s.times.len(), s.lengths.len());
    assert!((s.times.last().unwrap() - s.profile.total_time).abs() < 1e-15);
    for w in s.times.windows(2) {
        assert!(w[1] > w[0]);
    }
}

#[test]
fn reference_rates_match_length_differences() {
    let s = reference_series(&SimConfig::default()).unwrap();
    for i in (1..s.times.len() - 1).step_by(97) {
        let dt = s.times[i + 1] - s.times[i - 1];
        for k in 0..4 {
            let fd = (s.lengths[i + 1][k] - s.lengths[i - 1][k]) / dt;
            // Kinks at the ramp corners limit agreement to the step size.
            assert!((fd - s.rates[i][k]).abs() < 1e-4, "t = {} cord {}", s.times[i], k + 1);
        }
    }
}
