use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ftb_bench::fixtures;
use ftb_core::{
    connection_table, fundamental_tensor, partial, run_suite, sasakian_obstruction,
    FinslerFunction, Slot, SuiteKind, SuiteOptions,
};

fn jets(c: &mut Criterion) {
    let mut g = c.benchmark_group("jet");
    for (m, p) in fixtures() {
        g.bench_function(format!("third_partial/{}", m.name()), |b| {
            b.iter(|| partial(&m, black_box(&p), &[Slot::Y(0), Slot::Y(1), Slot::X(0)]).unwrap())
        });
        g.bench_function(format!("fundamental_tensor/{}", m.name()), |b| {
            b.iter(|| fundamental_tensor(&m, black_box(&p)).unwrap())
        });
    }
    g.finish();
}

fn connection(c: &mut Criterion) {
    let mut g = c.benchmark_group("connection");
    g.sample_size(20);
    for (m, p) in fixtures() {
        g.bench_function(format!("table/{}", m.name()), |b| {
            b.iter(|| connection_table(&m, black_box(&p)).unwrap())
        });
        g.bench_function(format!("sasakian_obstruction/{}", m.name()), |b| {
            b.iter(|| sasakian_obstruction(&m, black_box(&p)).unwrap())
        });
    }
    g.finish();
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    let opts = SuiteOptions::default();
    for (m, p) in fixtures() {
        let pts = vec![p];
        for kind in [
            SuiteKind::Foliation,
            SuiteKind::Contact,
            SuiteKind::Curvature,
        ] {
            g.bench_function(format!("{kind}/{}", m.name()), |b| {
                b.iter(|| run_suite(kind, &m, black_box(&pts), &opts).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, jets, connection, suites);
criterion_main!(benches);
