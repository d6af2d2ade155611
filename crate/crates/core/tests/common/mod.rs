//! Independent helpers shared by the integration tests. Nothing here calls the
//! library's own solvers.
#![allow(dead_code)]

use scaffold_core::{Cord, Pose, RigConfig};

pub type Mat3 = [[f64; 3]; 3];

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cramer's rule.
pub fn cramer(m: &Mat3, b: &[f64; 3]) -> Option<[f64; 3]> {
    let d = det3(m);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut x = [0.0; 3];
    for col in 0..3 {
        let mut mc = *m;
        for row in 0..3 {
            mc[row][col] = b[row];
        }
        x[col] = det3(&mc) / d;
    }
    Some(x)
}

fn norm_1(m: &Mat3) -> f64 {
    (0..3).map(|c| (0..3).map(|r| m[r][c].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// 1-norm condition number via the adjugate inverse.
pub fn condition(m: &Mat3) -> f64 {
    let d = det3(m);
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
            let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
            inv[r][c] = (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) / d;
        }
    }
    norm_1(m) * norm_1(&inv)
}

/// Anchor-minus-corner vector of one cord, assembled from raw coordinates.
pub fn span(pose: &Pose, rig: &RigConfig, cord: Cord) -> (f64, f64) {
    let (ax, ay) = match cord {
        Cord::UpperLeft => (0.0, rig.stand_height),
        Cord::UpperRight => (rig.stand_width, rig.stand_height),
        Cord::LowerLeft => (0.0, 0.0),
        Cord::LowerRight => (rig.stand_width, 0.0),
    };
    let (ox, oy) = offset(pose, rig, cord);
    (ax - pose.x - ox, ay - pose.y - oy)
}

/// Rotated corner offset from the platform center.
pub fn offset(pose: &Pose, rig: &RigConfig, cord: Cord) -> (f64, f64) {
    let lx = if cord.is_left() { -rig.platform_width / 2.0 } else { rig.platform_width / 2.0 };
    let ly = if cord.is_upper() { rig.platform_height / 2.0 } else { -rig.platform_height / 2.0 };
    let (s, c) = pose.theta.sin_cos();
    (c * lx - s * ly, s * lx + c * ly)
}

/// Columns are the wrench per unit tension of each cord in `cords`.
pub fn wrench_matrix(pose: &Pose, rig: &RigConfig, cords: &[Cord; 3]) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for (col, &cord) in cords.iter().enumerate() {
        let (dx, dy) = span(pose, rig, cord);
        let l = (dx * dx + dy * dy).sqrt();
        let (ux, uy) = (dx / l, dy / l);
        let (ox, oy) = offset(pose, rig, cord);
        m[0][col] = ux;
        m[1][col] = uy;
        m[2][col] = ox * uy - oy * ux;
    }
    m
}

/// Every cord triple, each with the cord it leaves out.
pub const ALL_TRIPLES: [([Cord; 3], Cord); 4] = [
    ([Cord::UpperLeft, Cord::UpperRight, Cord::LowerLeft], Cord::LowerRight),
    ([Cord::UpperLeft, Cord::UpperRight, Cord::LowerRight], Cord::LowerLeft),
    ([Cord::UpperLeft, Cord::LowerLeft, Cord::LowerRight], Cord::UpperRight),
    ([Cord::UpperRight, Cord::LowerLeft, Cord::LowerRight], Cord::UpperLeft),
];

/// Static tensions of every triple that holds the platform at rest with
/// non-negative tensions.
pub fn feasible_triples(pose: &Pose, rig: &RigConfig) -> Vec<([Cord; 3], [f64; 4])> {
    let rhs = [0.0, rig.platform_mass * rig.gravity, 0.0];
    ALL_TRIPLES
        .iter()
        .filter_map(|(cords, _)| {
            let t = cramer(&wrench_matrix(pose, rig, cords), &rhs)?;
            if t.iter().any(|&v| v < -1e-9) {
                return None;
            }
            let mut full = [0.0; 4];
            for (k, &cord) in cords.iter().enumerate() {
                full[cord.index()] = t[k].max(0.0);
            }
            Some((*cords, full))
        })
        .collect()
}

/// Cord-length Jacobian of a triple, rows `[-ux, -uy, -(u · perp(offset))]`.
pub fn length_jacobian(pose: &Pose, rig: &RigConfig, cords: &[Cord; 3]) -> Mat3 {
    let w = wrench_matrix(pose, rig, cords);
    let mut j = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            j[r][c] = -w[c][r];
        }
    }
    j
}

/// Whether `cords` alone hold the platform at rest with non-negative tensions.
pub fn holds(pose: &Pose, rig: &RigConfig, cords: &[Cord; 3]) -> bool {
    let rhs = [0.0, rig.platform_mass * rig.gravity, 0.0];
    cramer(&wrench_matrix(pose, rig, cords), &rhs).is_some_and(|t| t.iter().all(|&v| v >= -1e-9))
}
