//! Tusimple-style records: one JSON object per line with `raw_file`,
//! `h_samples` (the fixed row grid), and `lanes` (per-lane x values aligned
//! to the grid, `-2` marking "no point at this row").

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

use super::{resample_at_rows, Lane, LaneSet};

/// One annotation record. `lanes[i][j]` is lane i's x at row `h_samples[j]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TusimpleRecord {
    pub raw_file: String,
    pub h_samples: Vec<u32>,
    pub lanes: Vec<Vec<f64>>,
}

/// Parse result for a single record line.
#[derive(Debug, Clone)]
pub struct TusimpleParse {
    pub record: TusimpleRecord,
    pub set: LaneSet,
    pub dropped_lanes: usize,
}

/// Parses one record line and builds its lane set: each `x >= 0` pairs with
/// its grid row, negative sentinels are skipped, and lanes left with fewer
/// than two points are dropped and counted.
pub fn parse_tusimple(line: &str, image_width: u32, image_height: u32) -> Result<TusimpleParse> {
    let record: TusimpleRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: 1,
        message: format!("bad record: {e}"),
    })?;
    validate_record(&record)?;
    let (set, dropped_lanes) = lane_set_from_record(&record, image_width, image_height)?;
    Ok(TusimpleParse {
        record,
        set,
        dropped_lanes,
    })
}

fn validate_record(record: &TusimpleRecord) -> Result<()> {
    if record.h_samples.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse {
            line: 1,
            message: "h_samples must be strictly ascending".into(),
        });
    }
    for (i, lane) in record.lanes.iter().enumerate() {
        if lane.len() != record.h_samples.len() {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "lane {i} has {} entries for {} h_samples (ragged record)",
                    lane.len(),
                    record.h_samples.len()
                ),
            });
        }
        if lane.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse {
                line: 1,
                message: format!("lane {i} contains a non-finite x"),
            });
        }
    }
    Ok(())
}

/// Builds the in-memory lane set from a record. Returns the set and the
/// number of dropped (sub-2-point) lanes.
pub fn lane_set_from_record(
    record: &TusimpleRecord,
    image_width: u32,
    image_height: u32,
) -> Result<(LaneSet, usize)> {
    let mut lanes = Vec::new();
    let mut dropped = 0usize;
    for xs in &record.lanes {
        let points: Vec<(f64, f64)> = xs
            .iter()
            .zip(&record.h_samples)
            .filter(|(x, _)| **x >= 0.0)
            .map(|(&x, &row)| (x, row as f64))
            .collect();
        if points.len() < 2 {
            dropped += 1;
            continue;
        }
        lanes.push(Lane::new(points).expect("grid rows ascend strictly"));
    }
    Ok((LaneSet::new(image_width, image_height, lanes)?, dropped))
}

/// Resamples every lane onto `h_samples` and assembles a record. Off-grid
/// rows carry the `-2` sentinel.
pub fn record_from_lane_set(
    set: &LaneSet,
    h_samples: &[u32],
    raw_file: &str,
) -> Result<TusimpleRecord> {
    if h_samples.is_empty() || h_samples.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter(
            "h_samples must be non-empty and strictly ascending".into(),
        ));
    }
    let lanes = set
        .lanes()
        .iter()
        .map(|lane| resample_at_rows(lane, h_samples))
        .collect();
    Ok(TusimpleRecord {
        raw_file: raw_file.to_string(),
        h_samples: h_samples.to_vec(),
        lanes,
    })
}

/// Serializes one record line. Integral x values (including the `-2`
/// sentinel) are written as integers for ecosystem compatibility.
pub fn write_tusimple(record: &TusimpleRecord) -> String {
    let lanes: Vec<serde_json::Value> = record
        .lanes
        .iter()
        .map(|lane| serde_json::Value::Array(lane.iter().map(|&x| json_number(x)).collect()))
        .collect();
    let value = serde_json::json!({
        "lanes": lanes,
        "h_samples": record.h_samples,
        "raw_file": record.raw_file,
    });
    serde_json::to_string(&value).expect("record serializes")
}

fn json_number(x: f64) -> serde_json::Value {
    if x.fract() == 0.0 && x.abs() < i64::MAX as f64 {
        serde_json::Value::from(x as i64)
    } else {
        serde_json::Value::from(x)
    }
}

/// Reads a record-per-line file. Parse failures name the offending line.
pub fn read_tusimple_file(path: &Path) -> Result<Vec<TusimpleRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: TusimpleRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: idx + 1,
            message: format!("bad record: {e}"),
        })?;
        validate_record(&record).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                line: idx + 1,
                message,
            },
            other => other,
        })?;
        records.push(record);
    }
    Ok(records)
}
