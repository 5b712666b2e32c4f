use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use indexlink_bench::simulation_config;
use indexlink_core::ledger::demo;
use indexlink_core::sim::run;

fn simulation(c: &mut Criterion) {
    for periods in [20, 120] {
        let config = simulation_config(periods);
        c.bench_function(&format!("simulate/{periods}"), |b| {
            b.iter(|| run(black_box(&config)).unwrap())
        });
    }
}

fn ledger_demo(c: &mut Criterion) {
    c.bench_function("ledger/replay", |b| b.iter(|| demo::replay().unwrap()));
}

criterion_group!(benches, simulation, ledger_demo);
criterion_main!(benches);
