//! Dense 3×3 helpers for the tension solve and forward kinematics.

use crate::math::abs;

pub(crate) type Mat3 = [[f64; 3]; 3];

/// Inverse by Gauss-Jordan elimination with partial pivoting. `None` when a
/// pivot vanishes.
pub(crate) fn inverse(m: &Mat3) -> Option<Mat3> {
    let mut a = *m;
    let mut inv = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| abs(a[i][col]).total_cmp(&abs(a[j][col])))
            .unwrap_or(col);
        if a[pivot][col] == 0.0 || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for k in 0..3 {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for row in 0..3 {
            if row != col {
                let f = a[row][col];
                for k in 0..3 {
                    a[row][k] -= f * a[col][k];
                    inv[row][k] -= f * inv[col][k];
                }
            }
        }
    }
    Some(inv)
}

pub(crate) fn mul_vec(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn norm_1(m: &Mat3) -> f64 {
    (0..3)
        .map(|c| abs(m[0][c]) + abs(m[1][c]) + abs(m[2][c]))
        .fold(0.0, f64::max)
}

/// Solution of `m x = b` plus the 1-norm condition number of `m`.
pub(crate) fn solve(m: &Mat3, b: &[f64; 3]) -> Option<([f64; 3], f64)> {
    let inv = inverse(m)?;
    let cond = norm_1(m) * norm_1(&inv);
    Some((mul_vec(&inv, b), cond))
}
