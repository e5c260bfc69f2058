use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use svgs_core::{convolve, make_kernel, Image, KernelParams, Region, RegionFilter};

fn test_image(side: usize) -> Image {
    Image::from_fn(side, side, |x, y| ((x * 7 + y * 13) % 256) as f64).unwrap()
}

fn kernel_construction(c: &mut Criterion) {
    let params = KernelParams::new(2.3, 0.9, 0.4);
    let mut group = c.benchmark_group("make_kernel");
    for side in [5, 9, 15] {
        group.bench_with_input(BenchmarkId::from_parameter(side), &side, |b, &side| {
            b.iter(|| make_kernel(black_box(params), side).unwrap())
        });
    }
    group.finish();
}

fn full_convolution(c: &mut Criterion) {
    let img = test_image(512);
    let mut group = c.benchmark_group("convolve_512");
    group.sample_size(20);
    for side in [3, 9] {
        let kernel = make_kernel(KernelParams::isotropic(1.5), side).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(side), &kernel, |b, k| {
            b.iter(|| convolve(black_box(&img), k).unwrap())
        });
    }
    group.finish();
}

fn block_risk(c: &mut Criterion) {
    let img = test_image(64);
    let filter = RegionFilter::new(
        &img,
        Region {
            x0: 20,
            y0: 20,
            w: 16,
            h: 16,
        },
        9,
    )
    .unwrap();
    let kernel = make_kernel(KernelParams::new(1.7, 0.6, -0.8), 9).unwrap();
    c.bench_function("block_risk_16x16", |b| b.iter(|| filter.risk(black_box(&kernel), 20.0)));
}

criterion_group!(benches, kernel_construction, full_convolution, block_risk);
criterion_main!(benches);
