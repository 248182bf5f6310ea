//! Replication throughput: one simulated day and one full ten-week run.

use criterion::{criterion_group, criterion_main, Criterion};

use shopfloor_core::config::{DepartmentProfile, SimulationConfig, StaffingPlan};
use shopfloor_core::domain::Simulation;
use shopfloor_core::engine::{RngStream, Triangular};
use shopfloor_core::metrics;

fn atv_config(weeks: u32, days_per_week: u32) -> SimulationConfig {
    let mut cfg = SimulationConfig::for_department(DepartmentProfile::atv());
    cfg.staffing = StaffingPlan::new(3, 7, 2);
    cfg.run.weeks = weeks;
    cfg.run.days_per_week = days_per_week;
    cfg
}

fn bench_single_day(c: &mut Criterion) {
    c.bench_function("replication_one_day", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let mut sim =
                Simulation::new(atv_config(1, 1), RngStream::for_replication(seed, 0, 0))
                    .unwrap();
            sim.run();
            metrics::snapshot(&sim)
        })
    });
}

fn bench_ten_weeks(c: &mut Criterion) {
    let mut group = c.benchmark_group("replication_ten_weeks");
    group.sample_size(10);
    group.bench_function("atv_practice_profile", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let mut sim =
                Simulation::new(atv_config(10, 7), RngStream::for_replication(seed, 0, 0))
                    .unwrap();
            sim.run();
            metrics::snapshot(&sim)
        })
    });
    group.finish();
}

fn bench_triangular(c: &mut Criterion) {
    c.bench_function("triangular_100k_draws", |b| {
        let dist = Triangular::new(3.0, 15.0, 30.0).unwrap();
        let mut rng = RngStream::from_seed_parts(1, &[]);
        b.iter(|| {
            let mut acc = 0.0;
            for _ in 0..100_000 {
                acc += dist.sample(&mut rng);
            }
            acc
        })
    });
}

criterion_group!(benches, bench_single_day, bench_ten_weeks, bench_triangular);
criterion_main!(benches);
