//! Benchmark metrics: lane rasterization, IoU matching, and the two
//! dataset-level evaluation protocols.

mod assignment;
mod culane;
mod tusimple;

pub use culane::{culane_f1, CulaneConfig, CulaneEvaluation, CulaneReport, ThresholdScore};
pub use tusimple::{tusimple_eval, TusimpleConfig, TusimpleReport};

use crate::annot::{Lane, LaneSet};
use crate::error::{Error, Result};
use crate::mask::BitMask;
use crate::raster::stroke_polyline;

/// Binary footprint of exactly one lane stroked at `line_width` pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaneMask {
    mask: BitMask,
    line_width: u32,
}

impl LaneMask {
    pub fn mask(&self) -> &BitMask {
        &self.mask
    }

    pub fn line_width(&self) -> u32 {
        self.line_width
    }
}

/// Strokes the lane polyline (round caps and joins, no anti-aliasing)
/// clipped to a `width` x `height` raster.
pub fn rasterize_lane(lane: &Lane, width: u32, height: u32, line_width: u32) -> Result<LaneMask> {
    if line_width == 0 {
        return Err(Error::Parameter("line width must be at least 1".into()));
    }
    let mut mask = BitMask::new(width, height);
    stroke_polyline(&mut mask, lane.points(), line_width as f64);
    Ok(LaneMask { mask, line_width })
}

/// Intersection over union of two lane masks; `0/0` counts as 0.
pub fn iou(a: &LaneMask, b: &LaneMask) -> Result<f64> {
    if !a.mask.same_shape(&b.mask) {
        return Err(Error::UnmatchedShape(format!(
            "{}x{} vs {}x{}",
            a.mask.width(),
            a.mask.height(),
            b.mask.width(),
            b.mask.height()
        )));
    }
    let union = a.mask.union_count(&b.mask);
    if union == 0 {
        return Ok(0.0);
    }
    Ok(a.mask.intersection_count(&b.mask) as f64 / union as f64)
}

/// One matched prediction/ground-truth pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub pred: usize,
    pub gt: usize,
    pub iou: f64,
}

/// One-to-one lane matching outcome at a fixed IoU threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub pairs: Vec<MatchedPair>,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

/// Pairwise IoU of two rasterized lane sets (`pred` rows, `gt` columns).
pub fn iou_matrix(
    pred: &LaneSet,
    gt: &LaneSet,
    width: u32,
    height: u32,
    line_width: u32,
) -> Result<Vec<Vec<f64>>> {
    let pred_masks: Vec<LaneMask> = pred
        .lanes()
        .iter()
        .map(|l| rasterize_lane(l, width, height, line_width))
        .collect::<Result<_>>()?;
    let gt_masks: Vec<LaneMask> = gt
        .lanes()
        .iter()
        .map(|l| rasterize_lane(l, width, height, line_width))
        .collect::<Result<_>>()?;
    pred_masks
        .iter()
        .map(|p| gt_masks.iter().map(|g| iou(p, g)).collect())
        .collect()
}

/// Matches predictions to ground truth on a precomputed IoU matrix: entries
/// below `tau` can never pair; the one-to-one assignment maximizes pair
/// count first and total IoU second, with ties broken toward ascending
/// (pred, gt) indices.
pub fn match_from_matrix(matrix: &[Vec<f64>], tau: f64) -> Result<MatchResult> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Parameter(format!(
            "IoU threshold must lie in (0, 1], got {tau}"
        )));
    }
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    if matrix.iter().any(|r| r.len() != cols) {
        return Err(Error::Parameter("ragged IoU matrix".into()));
    }
    if cols > 20 {
        return Err(Error::Parameter(format!(
            "matching supports at most 20 ground-truth lanes, got {cols}"
        )));
    }
    let pairs: Vec<MatchedPair> = assignment::optimal_pairs(
        rows,
        cols,
        |i, j| matrix[i][j],
        |i, j| matrix[i][j] >= tau,
        true,
    )
    .into_iter()
    .map(|(pred, gt)| MatchedPair {
        pred,
        gt,
        iou: matrix[pred][gt],
    })
    .collect();
    let tp = pairs.len();
    Ok(MatchResult {
        pairs,
        true_positives: tp,
        false_positives: rows - tp,
        false_negatives: cols - tp,
    })
}

/// Rasterizes both lane sets and matches them at threshold `tau`.
pub fn match_lanes(
    pred: &LaneSet,
    gt: &LaneSet,
    tau: f64,
    width: u32,
    height: u32,
    line_width: u32,
) -> Result<MatchResult> {
    let matrix = iou_matrix(pred, gt, width, height, line_width)?;
    if pred.is_empty() {
        // An empty matrix has no column count; synthesize the FN side.
        return Ok(MatchResult {
            pairs: Vec::new(),
            true_positives: 0,
            false_positives: 0,
            false_negatives: gt.len(),
        });
    }
    match_from_matrix(&matrix, tau)
}
