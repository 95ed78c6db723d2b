use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use lanefog_bench::{bench_image, bench_lane_set};
use lanefog_core::edges::{
    canny, downsample_label, merge_edge_label, render_lane_strokes, CannyParams,
};

fn edge_kernels(c: &mut Criterion) {
    let img = bench_image(5);
    let set = bench_lane_set(6, 4);
    let params = CannyParams::default();
    let detector = canny(&img, &params).unwrap();
    let strokes = render_lane_strokes(&set, 3).unwrap();

    let mut group = c.benchmark_group("edges_1640x590");
    group.sample_size(20);
    group.bench_function("canny", |b| {
        b.iter(|| canny(black_box(&img), &params).unwrap())
    });
    group.bench_function("render_lane_strokes_w3", |b| {
        b.iter(|| render_lane_strokes(black_box(&set), 3).unwrap())
    });
    group.bench_function("merge_and_downsample", |b| {
        b.iter(|| {
            let merged = merge_edge_label(black_box(&detector), black_box(&strokes)).unwrap();
            downsample_label(&merged, 4).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, edge_kernels);
criterion_main!(benches);
