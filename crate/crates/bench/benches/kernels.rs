use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ogstv::{mm_weights, ogs_prox, shrink_p, Fft2, GroupConfig, MMConfig, ShrinkParams};
use ogstv_bench::field;

fn fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft2");
    for n in [64, 128, 256] {
        let img = field(n, n);
        let plan = Fft2::new(n, n);
        group.bench_with_input(BenchmarkId::new("forward", n), &img, |b, img| {
            b.iter(|| plan.forward(black_box(img)).unwrap())
        });
        let spec = plan.forward(&img).unwrap();
        group.bench_with_input(BenchmarkId::new("inverse", n), &spec, |b, spec| {
            b.iter(|| plan.inverse(black_box(spec)).unwrap())
        });
    }
    group.finish();
}

fn prox(c: &mut Criterion) {
    let v = field(128, 128);
    let mut group = c.benchmark_group("ogs");
    for k in [2, 3, 5] {
        let cfg = GroupConfig::new(k).unwrap();
        group.bench_with_input(BenchmarkId::new("mm_weights", k), &cfg, |b, cfg| {
            b.iter(|| mm_weights(black_box(&v), cfg))
        });
        group.bench_with_input(BenchmarkId::new("ogs_prox", k), &cfg, |b, cfg| {
            b.iter(|| ogs_prox(black_box(&v), &MMConfig::default(), cfg))
        });
    }
    group.finish();

    let prm = ShrinkParams::new(0.5, 500.0 / 90.0).unwrap();
    c.bench_function("shrink_p/128", |b| b.iter(|| shrink_p(black_box(&v), &prm)));
}

criterion_group!(benches, fft, prox);
criterion_main!(benches);
