//! Point-tolerance accuracy evaluation over row-sampled lane records.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::annot::TusimpleRecord;
use crate::error::{Error, Result};

use super::assignment;

/// Matching rules: lateral pixel tolerance per point and the matched-point
/// ratio a predicted lane must exceed to count as a true positive.
#[derive(Debug, Clone, PartialEq)]
pub struct TusimpleConfig {
    pub pixel_tolerance: f64,
    pub match_ratio: f64,
}

impl Default for TusimpleConfig {
    fn default() -> Self {
        Self {
            pixel_tolerance: 20.0,
            match_ratio: 0.85,
        }
    }
}

impl TusimpleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pixel_tolerance >= 0.0 && self.pixel_tolerance.is_finite()) {
            return Err(Error::Parameter(format!(
                "pixel tolerance must be finite and >= 0, got {}",
                self.pixel_tolerance
            )));
        }
        if !(0.0..=1.0).contains(&self.match_ratio) {
            return Err(Error::Parameter(format!(
                "match ratio must lie in [0, 1], got {}",
                self.match_ratio
            )));
        }
        Ok(())
    }
}

/// Aggregate scores; every rate uses the `0/0 -> 0` convention.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TusimpleReport {
    pub accuracy: f64,
    pub fp_rate: f64,
    pub fn_rate: f64,
    pub f1: f64,
}

#[derive(Default, Clone, Copy)]
struct ImageTallies {
    matched_points: u64,
    gt_points: u64,
    true_positives: u64,
    pred_lanes: u64,
    gt_lanes: u64,
}

/// Evaluates predictions against ground truth keyed by `raw_file`. The
/// ground truth's `h_samples` define the row grid; predictions on a
/// different grid contribute only at shared rows. A point matches when the
/// lateral offset is within the tolerance; lanes pair one-to-one maximizing
/// total matched points; a paired lane is a true positive when it covers
/// strictly more than `match_ratio` of its ground-truth lane's valid points.
pub fn tusimple_eval(
    pred: &[TusimpleRecord],
    gt: &[TusimpleRecord],
    cfg: &TusimpleConfig,
) -> Result<TusimpleReport> {
    cfg.validate()?;
    let gt_by_file = index_records(gt, "ground truth")?;
    let pred_by_file = index_records(pred, "prediction")?;
    for key in pred_by_file.keys() {
        if !gt_by_file.contains_key(key) {
            return Err(Error::Eval(format!(
                "prediction references unknown image {key:?}"
            )));
        }
    }

    let tallies = gt
        .par_iter()
        .map(|gt_record| {
            let pred_record = pred_by_file.get(gt_record.raw_file.as_str()).copied();
            evaluate_image(pred_record, gt_record, cfg)
        })
        .reduce(ImageTallies::default, |a, b| ImageTallies {
            matched_points: a.matched_points + b.matched_points,
            gt_points: a.gt_points + b.gt_points,
            true_positives: a.true_positives + b.true_positives,
            pred_lanes: a.pred_lanes + b.pred_lanes,
            gt_lanes: a.gt_lanes + b.gt_lanes,
        });

    let ratio = |num: u64, den: u64| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let accuracy = ratio(tallies.matched_points, tallies.gt_points);
    let fp_rate = ratio(
        tallies.pred_lanes - tallies.true_positives,
        tallies.pred_lanes,
    );
    let fn_rate = ratio(tallies.gt_lanes - tallies.true_positives, tallies.gt_lanes);
    let precision = 1.0 - fp_rate;
    let recall = 1.0 - fn_rate;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(TusimpleReport {
        accuracy,
        fp_rate,
        fn_rate,
        f1,
    })
}

fn index_records<'a>(
    records: &'a [TusimpleRecord],
    what: &str,
) -> Result<BTreeMap<&'a str, &'a TusimpleRecord>> {
    let mut map = BTreeMap::new();
    for record in records {
        if map.insert(record.raw_file.as_str(), record).is_some() {
            return Err(Error::Eval(format!(
                "duplicate {what} record for {:?}",
                record.raw_file
            )));
        }
    }
    Ok(map)
}

fn evaluate_image(
    pred: Option<&TusimpleRecord>,
    gt: &TusimpleRecord,
    cfg: &TusimpleConfig,
) -> ImageTallies {
    let valid_per_gt_lane: Vec<u64> = gt
        .lanes
        .iter()
        .map(|lane| lane.iter().filter(|x| **x >= 0.0).count() as u64)
        .collect();
    let mut tallies = ImageTallies {
        gt_points: valid_per_gt_lane.iter().sum(),
        gt_lanes: gt.lanes.len() as u64,
        ..Default::default()
    };
    let Some(pred) = pred else {
        return tallies;
    };
    tallies.pred_lanes = pred.lanes.len() as u64;

    // Align each predicted lane onto the ground truth's row grid.
    let aligned: Vec<Vec<f64>> = if pred.h_samples == gt.h_samples {
        pred.lanes.clone()
    } else {
        let by_row: Vec<BTreeMap<u32, f64>> = pred
            .lanes
            .iter()
            .map(|lane| {
                pred.h_samples
                    .iter()
                    .copied()
                    .zip(lane.iter().copied())
                    .collect()
            })
            .collect();
        by_row
            .iter()
            .map(|rows| {
                gt.h_samples
                    .iter()
                    .map(|r| rows.get(r).copied().unwrap_or(-2.0))
                    .collect()
            })
            .collect()
    };

    // Matched-point counts per (pred, gt) lane pair.
    let counts: Vec<Vec<u64>> = aligned
        .iter()
        .map(|p| {
            gt.lanes
                .iter()
                .map(|g| {
                    p.iter()
                        .zip(g)
                        .filter(|(xp, xg)| {
                            **xp >= 0.0 && **xg >= 0.0 && (**xp - **xg).abs() <= cfg.pixel_tolerance
                        })
                        .count() as u64
                })
                .collect()
        })
        .collect();

    let pairs = assignment::optimal_pairs(
        aligned.len(),
        gt.lanes.len(),
        |i, j| counts[i][j] as f64,
        |i, j| counts[i][j] > 0,
        false,
    );
    for (p, g) in pairs {
        let matched = counts[p][g];
        tallies.matched_points += matched;
        let gt_valid = valid_per_gt_lane[g];
        if gt_valid > 0 && matched as f64 / gt_valid as f64 > cfg.match_ratio {
            tallies.true_positives += 1;
        }
    }
    tallies
}
