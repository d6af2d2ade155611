//! Per-cord discrete PI loops with output saturation and conditional
//! integration.

use crate::math::abs;
use crate::rig::CORD_COUNT;

/// Controller constants for one cord.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiGains {
    /// N·m per meter of length error.
    pub kp: f64,
    /// N·m per meter-second.
    pub ki: f64,
    /// Integrator clamp, m·s.
    pub windup_limit: f64,
}

impl PiGains {
    /// Gains with the default clamp `torque_limit / ki`, so the integral term
    /// alone never exceeds saturation.
    pub fn new(kp: f64, ki: f64, torque_limit: f64) -> Self {
        let windup_limit = if ki > 0.0 { torque_limit / ki } else { f64::INFINITY };
        Self { kp, ki, windup_limit }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiState {
    pub gains: PiGains,
    /// Integrated error, m·s.
    pub integral: f64,
    /// m.
    pub last_error: f64,
}

impl PiState {
    pub fn new(gains: PiGains) -> Self {
        Self { gains, integral: 0.0, last_error: 0.0 }
    }
}

/// One controller update. Returns the saturated command and the next state.
///
/// The integrator is frozen on steps where the output saturates and the error
/// would push it further into saturation.
pub fn pi_step(state: &PiState, error: f64, dt: f64, torque_limit: f64) -> (f64, PiState) {
    let g = &state.gains;
    let raw = g.kp * error + g.ki * state.integral;
    let command = raw.max(-torque_limit).min(torque_limit);
    let saturated = abs(raw) > torque_limit;
    let winding_up = saturated && raw * error > 0.0;
    let integral = if winding_up {
        state.integral
    } else {
        (state.integral + error * dt).max(-g.windup_limit).min(g.windup_limit)
    };
    (command, PiState { gains: state.gains, integral, last_error: error })
}

/// Independent PI loops, one per cord.
pub fn controller_bank(
    errors: &[f64; CORD_COUNT],
    states: &[PiState; CORD_COUNT],
    dt: f64,
    torque_limit: f64,
) -> ([f64; CORD_COUNT], [PiState; CORD_COUNT]) {
    let mut torques = [0.0; CORD_COUNT];
    let mut next = *states;
    for k in 0..CORD_COUNT {
        let (t, s) = pi_step(&states[k], errors[k], dt, torque_limit);
        torques[k] = t;
        next[k] = s;
    }
    (torques, next)
}
