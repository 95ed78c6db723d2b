//! Dataset-level F1 evaluation over CULane-style sidecar trees.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::annot::parse_culane;
use crate::dataset::SceneTag;
use crate::error::{Error, Result};

use super::{iou_matrix, match_from_matrix};

/// Evaluation settings: raster geometry plus the reported and mF1 threshold
/// grids.
#[derive(Debug, Clone, PartialEq)]
pub struct CulaneConfig {
    pub image_width: u32,
    pub image_height: u32,
    pub line_width: u32,
    /// Thresholds reported individually.
    pub thresholds: Vec<f64>,
    /// Grid averaged into mF1.
    pub mf1_grid: Vec<f64>,
}

impl Default for CulaneConfig {
    fn default() -> Self {
        Self {
            image_width: 1640,
            image_height: 590,
            line_width: 30,
            thresholds: vec![0.5, 0.65, 0.75, 0.85],
            mf1_grid: (0..10).map(|i| 0.5 + 0.05 * i as f64).collect(),
        }
    }
}

impl CulaneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.image_width == 0 || self.image_height == 0 {
            return Err(Error::Parameter(
                "raster dimensions must be positive".into(),
            ));
        }
        if self.line_width == 0 {
            return Err(Error::Parameter("line width must be at least 1".into()));
        }
        if self.thresholds.is_empty() {
            return Err(Error::Parameter(
                "at least one IoU threshold required".into(),
            ));
        }
        for &tau in self.thresholds.iter().chain(&self.mf1_grid) {
            if !(tau > 0.0 && tau <= 1.0) {
                return Err(Error::Parameter(format!(
                    "IoU threshold must lie in (0, 1], got {tau}"
                )));
            }
        }
        Ok(())
    }
}

/// Counts and derived scores at one IoU threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdScore {
    pub tau: f64,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Scores at each requested threshold plus the grid-averaged mF1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CulaneReport {
    pub thresholds: Vec<ThresholdScore>,
    pub mf1: f64,
}

/// Full evaluation output: the overall report, optional per-scene breakdown,
/// and bookkeeping counts.
#[derive(Debug, Clone)]
pub struct CulaneEvaluation {
    pub report: CulaneReport,
    pub per_scene: BTreeMap<SceneTag, CulaneReport>,
    pub images: usize,
    pub missing_predictions: usize,
}

/// Per-image matching counts for every threshold in the working grid.
struct ImageCounts {
    counts: Vec<(u64, u64, u64)>,
    scene: Option<SceneTag>,
    missing_prediction: bool,
}

/// Evaluates predictions against ground truth over the images named in
/// `list_file` (one relative path per line). A missing or unreadable
/// prediction sidecar counts as zero predicted lanes; an unreadable ground
/// truth sidecar fails the run. `scenes` optionally groups scores per scene
/// tag keyed by the listed relative path.
pub fn culane_f1(
    pred_root: &Path,
    gt_root: &Path,
    list_file: &Path,
    cfg: &CulaneConfig,
    scenes: Option<&BTreeMap<String, SceneTag>>,
) -> Result<CulaneEvaluation> {
    cfg.validate()?;
    let list = std::fs::read_to_string(list_file).map_err(|e| Error::io(list_file, e))?;
    let entries: Vec<&str> = list
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();

    // Single working grid: requested thresholds plus the mF1 grid.
    let mut taus: Vec<f64> = cfg
        .thresholds
        .iter()
        .chain(&cfg.mf1_grid)
        .copied()
        .collect();
    taus.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
    taus.dedup();

    let per_image: Vec<ImageCounts> = entries
        .par_iter()
        .map(|entry| evaluate_image(pred_root, gt_root, entry, cfg, &taus, scenes))
        .collect::<Result<_>>()?;

    let mut totals = vec![(0u64, 0u64, 0u64); taus.len()];
    let mut scene_totals: BTreeMap<SceneTag, Vec<(u64, u64, u64)>> = BTreeMap::new();
    let mut missing = 0usize;
    for img in &per_image {
        accumulate(&mut totals, &img.counts);
        if let Some(scene) = img.scene {
            accumulate(
                scene_totals
                    .entry(scene)
                    .or_insert_with(|| vec![(0, 0, 0); taus.len()]),
                &img.counts,
            );
        }
        missing += img.missing_prediction as usize;
    }

    Ok(CulaneEvaluation {
        report: build_report(&totals, &taus, cfg),
        per_scene: scene_totals
            .into_iter()
            .map(|(scene, t)| (scene, build_report(&t, &taus, cfg)))
            .collect(),
        images: entries.len(),
        missing_predictions: missing,
    })
}

fn accumulate(into: &mut [(u64, u64, u64)], from: &[(u64, u64, u64)]) {
    for (a, b) in into.iter_mut().zip(from) {
        a.0 += b.0;
        a.1 += b.1;
        a.2 += b.2;
    }
}

fn evaluate_image(
    pred_root: &Path,
    gt_root: &Path,
    entry: &str,
    cfg: &CulaneConfig,
    taus: &[f64],
    scenes: Option<&BTreeMap<String, SceneTag>>,
) -> Result<ImageCounts> {
    let rel = entry.trim_start_matches('/');
    let gt_path = sidecar_path(gt_root, rel);
    let gt_text = std::fs::read_to_string(&gt_path).map_err(|e| Error::io(&gt_path, e))?;
    let gt = parse_culane(&gt_text, cfg.image_width, cfg.image_height)?.set;

    let pred_path = sidecar_path(pred_root, rel);
    let (pred, missing_prediction) = match std::fs::read_to_string(&pred_path) {
        Ok(text) => match parse_culane(&text, cfg.image_width, cfg.image_height) {
            Ok(parsed) => (Some(parsed.set), false),
            Err(_) => (None, true),
        },
        Err(_) => (None, true),
    };

    let counts = match &pred {
        Some(pred) if !pred.is_empty() => {
            let matrix = iou_matrix(pred, &gt, cfg.image_width, cfg.image_height, cfg.line_width)?;
            taus.iter()
                .map(|&tau| {
                    let m = match_from_matrix(&matrix, tau)?;
                    Ok((
                        m.true_positives as u64,
                        m.false_positives as u64,
                        m.false_negatives as u64,
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        // No usable predictions: every ground-truth lane is missed.
        _ => vec![(0, 0, gt.len() as u64); taus.len()],
    };

    Ok(ImageCounts {
        counts,
        scene: scenes.and_then(|m| m.get(rel).copied()),
        missing_prediction,
    })
}

/// `a/b.jpg` annotations live in `a/b.lines.txt`; lines files listed
/// directly pass through unchanged.
fn sidecar_path(root: &Path, rel: &str) -> PathBuf {
    if rel.ends_with(".lines.txt") {
        return root.join(rel);
    }
    let mut path = root.join(rel);
    path.set_extension("lines.txt");
    path
}

fn precision_recall_f1(tp: u64, fp: u64, fn_: u64) -> (f64, f64, f64) {
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

fn build_report(totals: &[(u64, u64, u64)], taus: &[f64], cfg: &CulaneConfig) -> CulaneReport {
    let score_at = |tau: f64| -> ThresholdScore {
        let idx = taus
            .iter()
            .position(|&t| t == tau)
            .expect("tau comes from the working grid");
        let (tp, fp, fn_) = totals[idx];
        let (precision, recall, f1) = precision_recall_f1(tp, fp, fn_);
        ThresholdScore {
            tau,
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f1,
        }
    };
    let thresholds: Vec<ThresholdScore> = cfg.thresholds.iter().map(|&t| score_at(t)).collect();
    let mf1 = if cfg.mf1_grid.is_empty() {
        0.0
    } else {
        cfg.mf1_grid.iter().map(|&t| score_at(t).f1).sum::<f64>() / cfg.mf1_grid.len() as f64
    };
    CulaneReport { thresholds, mf1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annot::{write_culane, Lane, LaneSet};
    use std::fs;

    fn lane(x: f64) -> Lane {
        Lane::new(vec![(x, 0.0), (x + 30.0, 589.0)]).unwrap()
    }

    fn write_sidecar(root: &Path, rel: &str, set: &LaneSet) {
        let path = sidecar_path(root, rel);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, write_culane(set)).unwrap();
    }

    fn setup(images: &[(&str, LaneSet, Option<LaneSet>)]) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        fs::create_dir_all(root.join("gt")).unwrap();
        fs::create_dir_all(root.join("pred")).unwrap();
        let mut list = String::new();
        for (rel, gt, pred) in images {
            write_sidecar(&root.join("gt"), rel, gt);
            if let Some(pred) = pred {
                write_sidecar(&root.join("pred"), rel, pred);
            }
            list.push_str(rel);
            list.push('\n');
        }
        fs::write(root.join("list.txt"), list).unwrap();
        (dir, root)
    }

    #[test]
    fn perfect_predictions_score_one_everywhere() {
        let gt = LaneSet::new(1640, 590, vec![lane(300.0), lane(700.0)]).unwrap();
        let (_dir, root) = setup(&[
            ("d/a.jpg", gt.clone(), Some(gt.clone())),
            ("d/b.jpg", gt.clone(), Some(gt.clone())),
        ]);
        let eval = culane_f1(
            &root.join("pred"),
            &root.join("gt"),
            &root.join("list.txt"),
            &CulaneConfig::default(),
            None,
        )
        .unwrap();
        for s in &eval.report.thresholds {
            assert_eq!(s.f1, 1.0, "tau {}", s.tau);
            assert_eq!(s.precision, 1.0);
            assert_eq!(s.recall, 1.0);
        }
        assert_eq!(eval.report.mf1, 1.0);
        assert_eq!(eval.missing_predictions, 0);
    }

    #[test]
    fn counts_follow_the_formulas() {
        // One image: 2 matched lanes + 1 spurious prediction.
        let gt = LaneSet::new(1640, 590, vec![lane(300.0), lane(700.0)]).unwrap();
        let pred = LaneSet::new(1640, 590, vec![lane(300.0), lane(700.0), lane(1100.0)]).unwrap();
        let (_dir, root) = setup(&[("a.jpg", gt, Some(pred))]);
        let eval = culane_f1(
            &root.join("pred"),
            &root.join("gt"),
            &root.join("list.txt"),
            &CulaneConfig::default(),
            None,
        )
        .unwrap();
        let s = &eval.report.thresholds[0];
        assert_eq!(
            (s.true_positives, s.false_positives, s.false_negatives),
            (2, 1, 0)
        );
        assert!((s.precision - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.recall, 1.0);
        assert!((s.f1 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn missing_prediction_counts_zero_lanes_with_warning() {
        let gt = LaneSet::new(1640, 590, vec![lane(300.0)]).unwrap();
        let (_dir, root) = setup(&[("a.jpg", gt, None)]);
        let eval = culane_f1(
            &root.join("pred"),
            &root.join("gt"),
            &root.join("list.txt"),
            &CulaneConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(eval.missing_predictions, 1);
        let s = &eval.report.thresholds[0];
        assert_eq!(
            (s.true_positives, s.false_positives, s.false_negatives),
            (0, 0, 1)
        );
        assert_eq!(s.precision, 0.0, "0/0 convention");
        assert_eq!(s.f1, 0.0);
    }

    #[test]
    fn missing_ground_truth_is_a_hard_error() {
        let gt = LaneSet::new(1640, 590, vec![lane(300.0)]).unwrap();
        let (_dir, root) = setup(&[("a.jpg", gt.clone(), Some(gt))]);
        fs::write(root.join("list.txt"), "a.jpg\nmissing.jpg\n").unwrap();
        let err = culane_f1(
            &root.join("pred"),
            &root.join("gt"),
            &root.join("list.txt"),
            &CulaneConfig::default(),
            None,
        );
        assert!(matches!(err, Err(Error::Io { .. })));
    }

    #[test]
    fn f1_is_non_increasing_in_the_threshold() {
        // Slightly offset predictions give IoUs strictly inside (0, 1).
        let gt = LaneSet::new(1640, 590, vec![lane(300.0), lane(700.0)]).unwrap();
        let pred = LaneSet::new(1640, 590, vec![lane(308.0), lane(715.0)]).unwrap();
        let (_dir, root) = setup(&[("a.jpg", gt, Some(pred))]);
        let cfg = CulaneConfig {
            thresholds: (1..=19).map(|i| i as f64 * 0.05).collect(),
            ..Default::default()
        };
        let eval = culane_f1(
            &root.join("pred"),
            &root.join("gt"),
            &root.join("list.txt"),
            &cfg,
            None,
        )
        .unwrap();
        let f1s: Vec<f64> = eval.report.thresholds.iter().map(|s| s.f1).collect();
        assert!(f1s[0] > 0.0, "sanity: low threshold matches");
        assert!(*f1s.last().unwrap() < 1.0, "sanity: high threshold loses");
        for w in f1s.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "F1 rose with tau: {w:?}");
        }
    }

    #[test]
    fn scene_grouping_splits_the_totals() {
        let gt = LaneSet::new(1640, 590, vec![lane(300.0)]).unwrap();
        let (_dir, root) = setup(&[
            ("x/a.jpg", gt.clone(), Some(gt.clone())),
            ("x/b.jpg", gt.clone(), None),
        ]);
        let scenes: BTreeMap<String, SceneTag> = [
            ("x/a.jpg".to_string(), SceneTag::Normal),
            ("x/b.jpg".to_string(), SceneTag::Night),
        ]
        .into();
        let eval = culane_f1(
            &root.join("pred"),
            &root.join("gt"),
            &root.join("list.txt"),
            &CulaneConfig::default(),
            Some(&scenes),
        )
        .unwrap();
        assert_eq!(eval.per_scene[&SceneTag::Normal].thresholds[0].f1, 1.0);
        assert_eq!(eval.per_scene[&SceneTag::Night].thresholds[0].f1, 0.0);
    }
}
