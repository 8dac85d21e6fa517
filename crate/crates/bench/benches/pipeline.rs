use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use plc_core::equiv::{check_once, fuzz, sample_guarded, GuardThresholds, Mode};
use plc_core::{
    calibrate, estimate_homography, pl_from_homography, pl_from_ovps, CalibrateOptions,
    DirectionPair, Homography, OvpQuad, Scenario, ScenarioSpec,
};

fn sampled(n: usize) -> Vec<Homography> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let g = GuardThresholds::default();
    (0..n).map(|_| sample_guarded(&mut rng, &g)).collect()
}

fn bench_principal_line(c: &mut Criterion) {
    let hs = sampled(64);
    let mut group = c.benchmark_group("principal-line");
    group.bench_function("homography-form", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % hs.len();
            black_box(pl_from_homography(&hs[i]).unwrap())
        })
    });
    group.bench_function("ovp-form", |b| {
        let quads: Vec<OvpQuad> = hs
            .iter()
            .map(|h| OvpQuad::from_columns(h, DirectionPair::diagonal()))
            .collect();
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % quads.len();
            black_box(pl_from_ovps(&quads[i]).unwrap())
        })
    });
    group.bench_function("check-once", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % hs.len();
            black_box(check_once(&hs[i], DirectionPair::diagonal()).unwrap())
        })
    });
    group.finish();
}

fn bench_vanishing_routes(c: &mut Criterion) {
    let hs = sampled(64);
    let mut group = c.benchmark_group("vanishing");
    group.bench_function("columns", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % hs.len();
            black_box(OvpQuad::from_columns(&hs[i], DirectionPair::diagonal()))
        })
    });
    group.bench_function("square-edges", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % hs.len();
            black_box(OvpQuad::from_square_edges(&hs[i]).unwrap())
        })
    });
    group.finish();
}

fn bench_fuzz(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.bench_function("float-1000", |b| {
        b.iter(|| black_box(fuzz(1000, 42, 1e-9, Mode::Float)))
    });
    group.bench_function("exact-20", |b| {
        b.iter(|| black_box(fuzz(20, 42, 0.0, Mode::ExactRational)))
    });
    group.finish();
}

fn bench_calibration(c: &mut Criterion) {
    let mut group = c.benchmark_group("calibration");
    for n_views in [3u32, 10, 20] {
        let spec = ScenarioSpec {
            poses: n_views,
            seed: 5,
            noise: 0.5,
            pp: [320.0, 240.0],
            focal: 800.0,
            grid: [10.0, 10.0, 1.0],
        };
        let views = Scenario::from_spec(&spec).unwrap().views().unwrap();
        group.bench_with_input(BenchmarkId::new("dlt", n_views), &views, |b, views| {
            b.iter(|| black_box(estimate_homography(&views[0]).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("pipeline", n_views), &views, |b, views| {
            b.iter(|| black_box(calibrate(views, &CalibrateOptions::default()).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_principal_line,
    bench_vanishing_routes,
    bench_fuzz,
    bench_calibration
);
criterion_main!(benches);
