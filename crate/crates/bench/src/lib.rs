//! Deterministic workload generators shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lanefog_core::annot::{Lane, LaneSet};
use lanefog_core::depth::{synth_ground_plane_depth, DepthMap, GroundPlaneModel};
use lanefog_core::image::FloatImage;

/// Benchmark resolution matching the dataset convention.
pub const BENCH_WIDTH: u32 = 1640;
pub const BENCH_HEIGHT: u32 = 590;

/// Noisy road-like frame: sky gradient, textured asphalt, lane stripes.
pub fn bench_image(seed: u64) -> FloatImage {
    let (w, h) = (BENCH_WIDTH, BENCH_HEIGHT);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = h as f32 * 0.35;
    let mut data = Vec::with_capacity(w as usize * h as usize * 3);
    for y in 0..h {
        for x in 0..w {
            let base = if (y as f32) < horizon {
                0.75
            } else {
                let t = (y as f32 - horizon) / (h as f32 - horizon);
                0.25 + 0.1 * t + 0.05 * ((x as f32 * 0.7).sin() * (y as f32 * 0.5).cos())
            };
            let n: f32 = rng.random_range(-0.02..0.02);
            let v = (base + n).clamp(0.0, 1.0);
            data.extend_from_slice(&[v, v, (v + 0.02).min(1.0)]);
        }
    }
    FloatImage::from_raw(w, h, data).expect("samples are clamped")
}

pub fn bench_depth() -> DepthMap {
    let model =
        GroundPlaneModel::new(BENCH_HEIGHT as f32 * 0.35, 300.0, 1.0, 50.0).expect("valid model");
    synth_ground_plane_depth(BENCH_WIDTH, BENCH_HEIGHT, &model).expect("valid dimensions")
}

/// Full-height gently curving lanes, `n` per set.
pub fn bench_lane_set(seed: u64, n: usize) -> LaneSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lanes = (0..n)
        .map(|i| {
            let x0 = 200.0 + i as f64 * 300.0 + rng.random_range(-40.0..40.0);
            let curve = rng.random_range(-120.0..120.0);
            let points: Vec<(f64, f64)> = (0..20)
                .map(|k| {
                    let t = k as f64 / 19.0;
                    (x0 + curve * t * t, 150.0 + t * 430.0)
                })
                .collect();
            Lane::new(points).expect("monotone rows")
        })
        .collect();
    LaneSet::new(BENCH_WIDTH, BENCH_HEIGHT, lanes).expect("valid set")
}
