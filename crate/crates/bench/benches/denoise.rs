use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use svgs_core::{
    corrupt, denoise, estimate_orientation, estimate_sigma, optimize_block, DenoiseConfig, Image, NoiseDistribution,
    NoiseSpec, OptimizerSettings, Region,
};

fn noisy_image(side: usize) -> Image {
    let clean = Image::from_fn(side, side, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        128.0 + 60.0 * (fx * 0.11).sin() * (fy * 0.07).cos() + if x > side / 2 { 40.0 } else { 0.0 }
    })
    .unwrap();
    corrupt(&clean, &NoiseSpec::new(NoiseDistribution::Gaussian, 20.0, 1).unwrap()).unwrap()
}

fn block_fit(c: &mut Criterion) {
    let img = noisy_image(64);
    let ext = Region {
        x0: 24,
        y0: 24,
        w: 16,
        h: 16,
    };
    let theta = estimate_orientation(&img, ext).unwrap();
    let settings = OptimizerSettings::default();
    c.bench_function("optimize_block_16x16", |b| {
        b.iter(|| optimize_block(black_box(&img), ext, 20.0, theta, 9, &settings).unwrap())
    });
}

fn noise_estimate(c: &mut Criterion) {
    let img = noisy_image(256);
    c.bench_function("estimate_sigma_256", |b| {
        b.iter(|| estimate_sigma(black_box(&img), NoiseDistribution::Gaussian).unwrap())
    });
}

fn whole_image(c: &mut Criterion) {
    let img = noisy_image(128);
    let cfg = DenoiseConfig {
        sigma: Some(20.0),
        workers: 1,
        ..DenoiseConfig::default()
    };
    let mut group = c.benchmark_group("denoise");
    group.sample_size(10);
    group.bench_function("128x128_single_worker", |b| {
        b.iter(|| denoise(black_box(&img), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, block_fit, noise_estimate, whole_image);
criterion_main!(benches);
