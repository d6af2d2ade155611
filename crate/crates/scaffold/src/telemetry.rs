//! Telemetry CSV logs and two-column plot data.

use std::io::{Read, Write};

use scaffold_core::{Pose, TelemetryRecord};
use thiserror::Error;

pub const COLUMNS: [&str; 28] = [
    "t", "px", "py", "th", "px_ref", "py_ref", "th_ref", "L1", "L2", "L3", "L4", "L1_ref", "L2_ref", "L3_ref",
    "L4_ref", "T1", "T2", "T3", "T4", "tau1", "tau2", "tau3", "tau4", "w1", "w2", "w3", "w4", "power",
];

/// Significant digits written for every value.
pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Error)]
pub enum TelemetryError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unexpected header: expected `{expected}`")]
    Header { expected: String },
    #[error("row {row}, column `{column}`: `{value}` is not a number")]
    Value { row: usize, column: &'static str, value: String },
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
}

/// Shortest decimal for `x` rounded to `SIGNIFICANT_DIGITS`, fixed-point for
/// moderate magnitudes and scientific otherwise (like C's `%.9g`).
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn row_values(r: &TelemetryRecord) -> [f64; 28] {
    let mut v = [0.0; 28];
    v[0] = r.time;
    v[1..4].copy_from_slice(&[r.pose.x, r.pose.y, r.pose.theta]);
    v[4..7].copy_from_slice(&[r.pose_ref.x, r.pose_ref.y, r.pose_ref.theta]);
    v[7..11].copy_from_slice(&r.lengths);
    v[11..15].copy_from_slice(&r.lengths_ref);
    v[15..19].copy_from_slice(&r.tensions);
    v[19..23].copy_from_slice(&r.torques);
    v[23..27].copy_from_slice(&r.speeds);
    v[27] = r.power;
    v
}

fn from_values(v: &[f64; 28]) -> TelemetryRecord {
    let four = |i: usize| [v[i], v[i + 1], v[i + 2], v[i + 3]];
    TelemetryRecord {
        time: v[0],
        pose: Pose::new(v[1], v[2], v[3]),
        pose_ref: Pose::new(v[4], v[5], v[6]),
        lengths: four(7),
        lengths_ref: four(11),
        tensions: four(15),
        torques: four(19),
        speeds: four(23),
        power: v[27],
    }
}

pub fn write_csv<W: Write>(records: &[TelemetryRecord], out: W) -> Result<(), TelemetryError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(row_values(r).iter().map(|&x| format_value(x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<TelemetryRecord>, TelemetryError> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?;
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(TelemetryError::Header { expected: COLUMNS.join(",") });
    }
    let mut records = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let mut v = [0.0; 28];
        for (k, field) in row.iter().enumerate() {
            v[k] = field.trim().parse().map_err(|_| TelemetryError::Value {
                row: i + 1,
                column: COLUMNS[k],
                value: field.to_string(),
            })?;
        }
        records.push(from_values(&v));
    }
    Ok(records)
}

/// Value of one named column for a record.
pub fn channel(name: &str, r: &TelemetryRecord) -> Result<f64, TelemetryError> {
    let idx = COLUMNS
        .iter()
        .position(|&c| c == name)
        .ok_or_else(|| TelemetryError::UnknownChannel(name.to_string()))?;
    Ok(row_values(r)[idx])
}

/// Two columns, time and the channel, one row per record.
pub fn write_plot<W: Write>(records: &[TelemetryRecord], name: &str, out: W) -> Result<(), TelemetryError> {
    let dummy = TelemetryRecord::default();
    channel(name, &dummy)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", name])?;
    for r in records {
        w.write_record([format_value(r.time), format_value(channel(name, r)?)])?;
    }
    w.flush()?;
    Ok(())
}
