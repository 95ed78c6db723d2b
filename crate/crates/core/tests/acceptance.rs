//! End-to-end acceptance suite. Each test covers one release criterion and
//! prints a `criterion NN (...): PASS` line; run with `--nocapture` to see
//! the full checklist.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use lanefog_core::annot::{
    parse_culane, parse_tusimple, write_culane, write_tusimple, Lane, LaneSet, TusimpleRecord,
};
use lanefog_core::dataset::{split_dataset, Manifest, ManifestEntry, SceneTag, SplitKind};
use lanefog_core::depth::{synth_ground_plane_depth, DepthMap, GroundPlaneModel};
use lanefog_core::edges::{canny, CannyParams};
use lanefog_core::fog::{dark_channel, estimate_atmospheric_light, synthesize, FogParams};
use lanefog_core::image::FloatImage;
use lanefog_core::metrics::{
    culane_f1, iou, match_from_matrix, rasterize_lane, tusimple_eval, CulaneConfig, MatchedPair,
    TusimpleConfig,
};

fn pass(id: u32, name: &str) {
    println!("criterion {id:>2} ({name}): PASS");
}

/// Deterministic road-like test image: sky above a horizon, textured asphalt
/// with bright lane markings below, plus mild sensor noise everywhere.
fn road_image(w: u32, h: u32, seed: u64) -> FloatImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = h as f32 * 0.35;
    let vanish_x = w as f32 * 0.5;
    let lanes: Vec<f32> = vec![-0.8, -0.35, 0.05, 0.45, 0.9];
    let mut data = Vec::with_capacity(w as usize * h as usize * 3);
    for y in 0..h {
        let yf = y as f32;
        for x in 0..w {
            let xf = x as f32;
            let (mut r, mut g, mut b) = if yf < horizon {
                let t = yf / horizon;
                (0.72 - 0.06 * t, 0.76 - 0.05 * t, 0.82 - 0.03 * t)
            } else {
                let t = (yf - horizon) / (h as f32 - horizon);
                let base = 0.22 + 0.12 * t;
                let tex = 0.05 * ((xf * 0.71).sin() * (yf * 0.53).cos());
                let mut v = (base + tex, base + tex, base + tex + 0.02);
                // Lane markings fan out from the vanishing point.
                for &slope in &lanes {
                    let lane_x = vanish_x + slope * (yf - horizon) * (w as f32 / h as f32);
                    if (xf - lane_x).abs() < 2.0 + 3.0 * t {
                        v = (0.85, 0.85, 0.8);
                    }
                }
                v
            };
            let n: f32 = rng.random_range(-0.02..0.02);
            r = (r + n).clamp(0.0, 1.0);
            g = (g + n).clamp(0.0, 1.0);
            b = (b + n).clamp(0.0, 1.0);
            data.extend_from_slice(&[r, g, b]);
        }
    }
    FloatImage::from_raw(w, h, data).unwrap()
}

fn road_ground_plane(h: u32) -> GroundPlaneModel {
    GroundPlaneModel::new(h as f32 * 0.35, h as f32 * 0.5, 1.0, 50.0).unwrap()
}

#[test]
fn criterion_01_fog_identity_and_asymptote() {
    let img = road_image(1640, 590, 101);
    let depth = synth_ground_plane_depth(1640, 590, &road_ground_plane(590)).unwrap();

    let started = Instant::now();
    let identity = synthesize(
        &img,
        &depth,
        &FogParams {
            beta: 0.0,
            ..Default::default()
        },
    )
    .unwrap();
    let elapsed = started.elapsed();

    let original = img.to_rgb8();
    let rendered = identity.image.to_rgb8();
    for (a, b) in original.as_raw().iter().zip(rendered.as_raw()) {
        assert!(
            a.abs_diff(*b) <= 1,
            "beta=0 output differs by more than 1 LSB"
        );
    }

    let flat = DepthMap::new(1640, 590, vec![1.0; 1640 * 590], true).unwrap();
    let saturated = synthesize(
        &img,
        &flat,
        &FogParams {
            beta: 50.0,
            ..Default::default()
        },
    )
    .unwrap();
    let a_quant = (saturated.atmospheric_light * 255.0).round() as i32;
    for v in saturated.image.to_rgb8().as_raw() {
        assert!(
            (*v as i32 - a_quant).abs() <= 1,
            "beta=50, d=1 pixel {v} is farther than 1 LSB from A"
        );
    }

    assert!(
        elapsed.as_secs_f64() < 1.0,
        "single 1640x590 synthesis took {elapsed:?}"
    );
    pass(1, "fog identity & asymptote");
}

#[test]
fn criterion_02_fog_tiering_degrades_contrast_and_edges() {
    let img = road_image(1640, 590, 202);
    let depth = synth_ground_plane_depth(1640, 590, &road_ground_plane(590)).unwrap();
    let canny_params = CannyParams::default();

    let clear_edges = canny(&img, &canny_params).unwrap().count_ones();
    let mut mean_dists = Vec::new();
    let mut edge_counts = Vec::new();
    for beta in [2.0f32, 4.0, 8.0] {
        let render = synthesize(
            &img,
            &depth,
            &FogParams {
                beta,
                ..Default::default()
            },
        )
        .unwrap();
        let a = render.atmospheric_light;
        let mean = render
            .image
            .data()
            .iter()
            .map(|v| (v - a).abs() as f64)
            .sum::<f64>()
            / render.image.data().len() as f64;
        mean_dists.push(mean);
        edge_counts.push(canny(&render.image, &canny_params).unwrap().count_ones());
    }

    assert!(
        mean_dists[0] > mean_dists[1] && mean_dists[1] > mean_dists[2],
        "mean distance to A must strictly decrease over beta 2 -> 4 -> 8: {mean_dists:?}"
    );
    assert!(
        clear_edges > edge_counts[0],
        "fog must remove edges: clear {clear_edges} vs beta=2 {}",
        edge_counts[0]
    );
    assert!(
        edge_counts[0] > edge_counts[1] && edge_counts[1] > edge_counts[2],
        "edge count must strictly decrease over beta 2 -> 4 -> 8: {edge_counts:?}"
    );
    pass(2, "fog tiering");
}

#[test]
fn criterion_03_dark_channel_equals_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for case in 0..200 {
        let data: Vec<f32> = (0..8 * 8 * 3)
            .map(|_| rng.random_range(0.0..=1.0))
            .collect();
        let img = FloatImage::from_raw(8, 8, data).unwrap();
        for window in [1u32, 3, 5] {
            let fast = dark_channel(&img, window).unwrap();
            let r = (window / 2) as i64;
            for y in 0..8i64 {
                for x in 0..8i64 {
                    let mut exact = f32::INFINITY;
                    for yy in (y - r).max(0)..=(y + r).min(7) {
                        for xx in (x - r).max(0)..=(x + r).min(7) {
                            let p = img.pixel(xx as u32, yy as u32);
                            exact = exact.min(p[0]).min(p[1]).min(p[2]);
                        }
                    }
                    assert_eq!(
                        fast.value(x as u32, y as u32),
                        exact,
                        "case {case} window {window} at ({x},{y})"
                    );
                }
            }
        }
    }
    pass(3, "dark channel oracle");
}

#[test]
fn criterion_04_atmospheric_light_on_the_constructed_example() {
    let mut data = vec![0.5f32; 10 * 10 * 3];
    let bright = (3 * 10 + 4) * 3;
    data[bright] = 0.9;
    data[bright + 1] = 0.8;
    data[bright + 2] = 0.85;
    let img = FloatImage::from_raw(10, 10, data).unwrap();
    let dark = dark_channel(&img, 1).unwrap();
    let a = estimate_atmospheric_light(&img, &dark, 0.001).unwrap();
    assert_eq!(a, 0.9, "expected exactly 0.9, got {a}");
    pass(4, "atmospheric light");
}

fn random_lane(rng: &mut ChaCha8Rng, w: u32, h: u32) -> Lane {
    let n = rng.random_range(2..=12usize);
    let hf = h as f64;
    let y0 = rng.random_range(0.0..hf * 0.4);
    let y1 = rng.random_range(y0 + 60.0..hf);
    let x0 = rng.random_range(60.0..w as f64 - 60.0);
    let drift = rng.random_range(-150.0..150.0);
    let points = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            (
                (x0 + drift * t).clamp(5.0, w as f64 - 5.0),
                y0 + t * (y1 - y0),
            )
        })
        .collect();
    Lane::new(points).unwrap()
}

fn random_lane_set(rng: &mut ChaCha8Rng, w: u32, h: u32, min_lanes: usize) -> LaneSet {
    let n = rng.random_range(min_lanes..=8usize.min(min_lanes + 4));
    let lanes = (0..n).map(|_| random_lane(rng, w, h)).collect();
    LaneSet::new(w, h, lanes).unwrap()
}

fn write_sidecar_tree(root: &Path, sets: &[(String, LaneSet)]) {
    for (rel, set) in sets {
        let mut path = root.join(rel);
        path.set_extension("lines.txt");
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, write_culane(set)).unwrap();
    }
}

fn random_tusimple_records(rng: &mut ChaCha8Rng, n: usize) -> Vec<TusimpleRecord> {
    let rows: Vec<u32> = (160..=710).step_by(10).collect();
    (0..n)
        .map(|i| {
            let lanes = (0..rng.random_range(1..=4usize))
                .map(|_| {
                    let start = rng.random_range(0..rows.len() / 2);
                    let end = rng.random_range(start + 2..rows.len());
                    let x0 = rng.random_range(100.0..1100.0f64);
                    let slope = rng.random_range(-0.8..0.8f64);
                    rows.iter()
                        .enumerate()
                        .map(|(j, _)| {
                            if j >= start && j <= end {
                                (x0 + slope * (j - start) as f64 * 10.0).round()
                            } else {
                                -2.0
                            }
                        })
                        .collect()
                })
                .collect();
            TusimpleRecord {
                raw_file: format!("clips/{i:05}.jpg"),
                h_samples: rows.clone(),
                lanes,
            }
        })
        .collect()
}

#[test]
fn criterion_05_metric_self_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let dir = tempfile::tempdir().unwrap();
    let sets: Vec<(String, LaneSet)> = (0..6)
        .map(|i| {
            (
                format!("drv/{i:03}.jpg"),
                random_lane_set(&mut rng, 1640, 590, 1),
            )
        })
        .collect();
    write_sidecar_tree(&dir.path().join("gt"), &sets);
    write_sidecar_tree(&dir.path().join("pred"), &sets);
    let list: String = sets.iter().map(|(rel, _)| format!("{rel}\n")).collect();
    std::fs::write(dir.path().join("list.txt"), list).unwrap();

    let eval = culane_f1(
        &dir.path().join("pred"),
        &dir.path().join("gt"),
        &dir.path().join("list.txt"),
        &CulaneConfig::default(),
        None,
    )
    .unwrap();
    for s in &eval.report.thresholds {
        assert_eq!(s.f1, 1.0, "F1 at tau {}", s.tau);
    }
    assert_eq!(eval.report.mf1, 1.0);

    let records = random_tusimple_records(&mut rng, 8);
    let report = tusimple_eval(&records, &records, &TusimpleConfig::default()).unwrap();
    assert_eq!(report.accuracy, 1.0);
    assert_eq!(report.fp_rate, 0.0);
    assert_eq!(report.fn_rate, 0.0);
    pass(5, "metric self-identity");
}

#[test]
fn criterion_06_analytic_iou_of_offset_lanes() {
    let a = rasterize_lane(
        &Lane::new(vec![(50.0, 0.0), (50.0, 99.0)]).unwrap(),
        120,
        100,
        30,
    )
    .unwrap();
    let b = rasterize_lane(
        &Lane::new(vec![(65.0, 0.0), (65.0, 99.0)]).unwrap(),
        120,
        100,
        30,
    )
    .unwrap();
    let v = iou(&a, &b).unwrap();
    assert!(
        (v - 1.0 / 3.0).abs() <= 0.03,
        "expected 1/3 +- 0.03, got {v}"
    );
    pass(6, "analytic IoU");
}

/// Best assignment seen so far: (pair count, total IoU, pairs).
type BestAssignment = Option<(u32, f64, Vec<(usize, usize)>)>;

/// Exhaustive one-to-one assignment search mirroring the matcher's contract:
/// maximize pair count, then total IoU, preferring lexicographically smaller
/// pair lists. Enumeration order visits candidates in lexicographic order,
/// so keeping the first strict improvement realizes the tie-break.
fn enumerate_matching(matrix: &[Vec<f64>], tau: f64) -> Vec<(usize, usize)> {
    fn recurse(
        i: usize,
        matrix: &[Vec<f64>],
        tau: f64,
        used: &mut Vec<bool>,
        pairs: &mut Vec<(usize, usize)>,
        best: &mut BestAssignment,
    ) {
        if i == matrix.len() {
            let count = pairs.len() as u32;
            let total: f64 = pairs.iter().map(|&(r, c)| matrix[r][c]).sum();
            let replace = match best {
                None => true,
                Some((bc, bt, _)) => (count, total) > (*bc, *bt),
            };
            if replace {
                *best = Some((count, total, pairs.clone()));
            }
            return;
        }
        for j in 0..used.len() {
            if !used[j] && matrix[i][j] >= tau {
                used[j] = true;
                pairs.push((i, j));
                recurse(i + 1, matrix, tau, used, pairs, best);
                pairs.pop();
                used[j] = false;
            }
        }
        recurse(i + 1, matrix, tau, used, pairs, best);
    }
    let cols = matrix.first().map_or(0, Vec::len);
    let mut best = None;
    recurse(
        0,
        matrix,
        tau,
        &mut vec![false; cols],
        &mut Vec::new(),
        &mut best,
    );
    best.map(|(_, _, pairs)| pairs).unwrap_or_default()
}

#[test]
fn criterion_07_matching_equals_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for case in 0..500 {
        let rows = rng.random_range(0..=4usize);
        let cols = rng.random_range(0..=4usize);
        let matrix: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let expected = enumerate_matching(&matrix, 0.5);
        if rows == 0 {
            assert!(expected.is_empty());
            continue;
        }
        let got = match_from_matrix(&matrix, 0.5).unwrap();
        let got_pairs: Vec<(usize, usize)> = got.pairs.iter().map(|p| (p.pred, p.gt)).collect();
        assert_eq!(got_pairs, expected, "case {case}: {matrix:?}");
        assert_eq!(got.true_positives, expected.len());
        assert_eq!(got.false_positives, rows - expected.len());
        assert_eq!(got.false_negatives, cols - expected.len());
    }

    // Exact ties resolve toward ascending indices.
    let tied = vec![vec![0.7, 0.7], vec![0.7, 0.7]];
    let got = match_from_matrix(&tied, 0.5).unwrap();
    assert_eq!(
        got.pairs,
        vec![
            MatchedPair {
                pred: 0,
                gt: 0,
                iou: 0.7
            },
            MatchedPair {
                pred: 1,
                gt: 1,
                iou: 0.7
            },
        ]
    );
    pass(7, "matching oracle");
}

#[test]
fn criterion_08_point_tolerance_rules() {
    let rows: Vec<u32> = (160..=250).step_by(10).collect();
    let gt = vec![TusimpleRecord {
        raw_file: "a.jpg".into(),
        h_samples: rows.clone(),
        lanes: vec![vec![500.0; 10]],
    }];

    // Nine points within 20 px (boundary inclusive), one off by 25.
    let mut nine = vec![520.0; 10];
    nine[3] = 525.0;
    let pred = vec![TusimpleRecord {
        raw_file: "a.jpg".into(),
        h_samples: rows.clone(),
        lanes: vec![nine],
    }];
    let report = tusimple_eval(&pred, &gt, &TusimpleConfig::default()).unwrap();
    assert!((report.accuracy - 0.9).abs() < 1e-12, "{}", report.accuracy);
    assert_eq!(report.fp_rate, 0.0, "9/10 > 0.85 is a true positive");
    assert_eq!(report.fn_rate, 0.0);

    // Eight of ten: below the ratio, lane flips to FP + FN but the matched
    // points still count.
    let mut eight = vec![520.0; 10];
    eight[3] = 525.0;
    eight[7] = 460.0;
    let pred = vec![TusimpleRecord {
        raw_file: "a.jpg".into(),
        h_samples: rows,
        lanes: vec![eight],
    }];
    let report = tusimple_eval(&pred, &gt, &TusimpleConfig::default()).unwrap();
    assert!((report.accuracy - 0.8).abs() < 1e-12, "{}", report.accuracy);
    assert_eq!(report.fp_rate, 1.0);
    assert_eq!(report.fn_rate, 1.0);
    pass(8, "point-tolerance rules");
}

#[test]
fn criterion_09_format_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for case in 0..1000 {
        let set = random_lane_set(&mut rng, 1640, 590, 0);
        let text = write_culane(&set);
        let parsed = parse_culane(&text, 1640, 590).unwrap();
        assert_eq!(parsed.set.len(), set.len(), "case {case}");
        assert_eq!(parsed.dropped_lanes, 0, "case {case}");
        for (a, b) in parsed.set.lanes().iter().zip(set.lanes()) {
            assert_eq!(a.points().len(), b.points().len(), "case {case}");
            for (p, q) in a.points().iter().zip(b.points()) {
                assert!(
                    (p.0 - q.0).abs() <= 1e-4 && (p.1 - q.1).abs() <= 1e-4,
                    "case {case}: {p:?} vs {q:?}"
                );
            }
        }
    }

    for record in random_tusimple_records(&mut rng, 50) {
        let line = write_tusimple(&record);
        let parsed = parse_tusimple(&line, 1280, 720).unwrap();
        assert_eq!(parsed.record, record);
        assert_eq!(
            write_tusimple(&parsed.record),
            line,
            "bit-identical rewrite"
        );
    }
    pass(9, "format round trips");
}

#[test]
fn criterion_10_scene_balanced_split() {
    let entries: Vec<ManifestEntry> = SceneTag::ALL
        .iter()
        .flat_map(|&scene| {
            (0..200).map(move |i| ManifestEntry {
                path: format!("{}/{i:04}.jpg", scene.name().to_lowercase()),
                scene,
            })
        })
        .collect();
    let manifest = Manifest::new(entries, SplitKind::All).unwrap();
    assert_eq!(manifest.len(), 1200);

    let (train, test) = split_dataset(&manifest, 2, 1, 17).unwrap();
    assert_eq!(train.len() + test.len(), 1200);
    for scene in SceneTag::ALL {
        let n_train = train.entries.iter().filter(|e| e.scene == scene).count() as f64;
        let n_test = test.entries.iter().filter(|e| e.scene == scene).count() as f64;
        assert_eq!(n_train + n_test, 200.0);
        let exact = 200.0 * 2.0 / 3.0;
        assert!(
            (n_train - exact).abs() <= 1.0,
            "{scene}: train {n_train} deviates from 2:1 by more than one item"
        );
    }

    let (train2, test2) = split_dataset(&manifest, 2, 1, 17).unwrap();
    assert_eq!(train, train2, "same seed must reproduce the split");
    assert_eq!(test, test2);
    let (train3, _) = split_dataset(&manifest, 2, 1, 18).unwrap();
    assert_eq!(train3.len(), train.len());
    assert_ne!(train3, train, "different seed should permute membership");
    pass(10, "split contract");
}

#[test]
fn criterion_11_throughput_targets() {
    // Fog synthesis throughput, parallel across images.
    let base = road_image(1640, 590, 1111);
    let images: Vec<FloatImage> = (0..12).map(|_| base.clone()).collect();
    let depth = synth_ground_plane_depth(1640, 590, &road_ground_plane(590)).unwrap();
    let params = FogParams::default();
    let started = Instant::now();
    let rendered: Vec<f32> = images
        .par_iter()
        .map(|img| synthesize(img, &depth, &params).unwrap().atmospheric_light)
        .collect();
    let elapsed = started.elapsed().as_secs_f64();
    assert_eq!(rendered.len(), 12);
    let per_second = images.len() as f64 / elapsed;
    assert!(
        per_second >= 10.0,
        "fog synthesis ran at {per_second:.1} images/s"
    );

    // Evaluation of 1,000 image pairs through the file-based path.
    let mut rng = ChaCha8Rng::seed_from_u64(1112);
    let dir = tempfile::tempdir().unwrap();
    let sets: Vec<(String, LaneSet)> = (0..1000)
        .map(|i| {
            (
                format!("drv/{i:05}.jpg"),
                random_lane_set(&mut rng, 1640, 590, 2),
            )
        })
        .collect();
    write_sidecar_tree(&dir.path().join("gt"), &sets);
    write_sidecar_tree(&dir.path().join("pred"), &sets);
    let list: String = sets.iter().map(|(rel, _)| format!("{rel}\n")).collect();
    let list_path: PathBuf = dir.path().join("list.txt");
    std::fs::write(&list_path, list).unwrap();

    let started = Instant::now();
    let eval = culane_f1(
        &dir.path().join("pred"),
        &dir.path().join("gt"),
        &list_path,
        &CulaneConfig::default(),
        None,
    )
    .unwrap();
    let eval_elapsed = started.elapsed().as_secs_f64();
    assert_eq!(eval.images, 1000);
    assert_eq!(eval.report.mf1, 1.0, "self-evaluation sanity");
    assert!(
        eval_elapsed < 60.0,
        "evaluating 1000 pairs took {eval_elapsed:.1}s"
    );
    pass(11, "throughput");
}
