use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jrp_core::model::rational::ratio;
use jrp_core::sync::{epoch_occupancy, ijr, ujr, union_rate, OrderSeries, SeriesFamily};
use jrp_core::SyncConfig;
use std::hint::black_box;

fn family(label: &str, periods: &[(i64, i64)]) -> SeriesFamily {
    let series = periods
        .iter()
        .map(|&(n, d)| OrderSeries::new(ratio(n, d)).unwrap())
        .collect();
    SeriesFamily::new(label, series).unwrap()
}

fn union(c: &mut Criterion) {
    let cfg = SyncConfig::default();
    let mut group = c.benchmark_group("union_rate");
    for k in [4usize, 8, 12, 16] {
        let periods: Vec<_> = (0..k as i64).map(|i| ratio(2 * i + 3, 7)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(k), &periods, |b, p| {
            b.iter(|| union_rate(black_box(p), &cfg).unwrap())
        });
    }
    group.finish();
}

fn families(c: &mut Criterion) {
    let cfg = SyncConfig::default();
    let fams = vec![
        family("a", &[(3, 2), (5, 3)]),
        family("b", &[(7, 4), (9, 5)]),
        family("c", &[(11, 6), (13, 7)]),
    ];
    c.bench_function("ujr/3x2", |b| {
        b.iter(|| ujr(black_box(&fams), &cfg).unwrap())
    });
    c.bench_function("ijr/3x2", |b| {
        b.iter(|| ijr(black_box(&fams), &cfg).unwrap())
    });
    c.bench_function("occupancy/3x2", |b| {
        b.iter(|| epoch_occupancy(black_box(&fams), &cfg).unwrap())
    });
}

criterion_group!(benches, union, families);
criterion_main!(benches);
