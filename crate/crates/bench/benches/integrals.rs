use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lhp_core::functionals::ln_cumulant_integral;
use lhp_core::{intersection_volume, ModelConfig};

fn moment_integrals(c: &mut Criterion) {
    let mut group = c.benchmark_group("ln_cumulant_integral");
    for (d, lambda) in [(2, 0.5), (4, 0.0), (4, 0.7), (6, 1.0)] {
        let cfg = ModelConfig::new(d, lambda, 10.0).unwrap();
        for k in [2, 4] {
            group.bench_with_input(
                BenchmarkId::new(format!("d{d}_l{lambda}"), k),
                &k,
                |b, &k| b.iter(|| ln_cumulant_integral(black_box(&cfg), k).unwrap()),
            );
        }
    }
    group.finish();
}

fn section_volume(c: &mut Criterion) {
    let cfg = ModelConfig::new(7, 0.3, 8.0).unwrap();
    c.bench_function("intersection_volume_d7", |b| {
        b.iter(|| intersection_volume(black_box(&cfg), black_box(1.7)))
    });
}

criterion_group!(benches, moment_integrals, section_volume);
criterion_main!(benches);
