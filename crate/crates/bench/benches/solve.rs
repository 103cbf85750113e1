use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jrp_core::gen::{random_instance, rng, InstanceSpec};
use jrp_core::model::rational::int;
use jrp_core::solve::{coordinate_descent, exhaustive_search, power_of_two};
use jrp_core::SolveConfig;
use std::hint::black_box;

fn solvers(c: &mut Criterion) {
    let cfg = SolveConfig::default();
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for n in [2usize, 3, 4] {
        let spec = InstanceSpec {
            n,
            ..InstanceSpec::default()
        };
        let instance = random_instance(&mut rng(n as u64), &spec);
        let bounds = vec![(1, 8); n];
        group.bench_with_input(BenchmarkId::new("exhaustive", n), &instance, |b, inst| {
            b.iter(|| exhaustive_search(black_box(inst), &bounds, None, &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("pot", n), &instance, |b, inst| {
            b.iter(|| power_of_two(black_box(inst), &int(1), false, &cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("pot_base", n), &instance, |b, inst| {
            b.iter(|| power_of_two(black_box(inst), &int(1), true, &cfg).unwrap())
        });
        let start = power_of_two(&instance, &int(1), false, &cfg)
            .unwrap()
            .policy;
        group.bench_with_input(BenchmarkId::new("descent", n), &instance, |b, inst| {
            b.iter(|| coordinate_descent(black_box(inst), &start, None, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, solvers);
criterion_main!(benches);
