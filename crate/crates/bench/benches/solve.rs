use std::hint::black_box;

use cbeam_core::assembly::assemble;
use cbeam_core::benchmarks::{default_material, Benchmark, DEFAULT_LOAD};
use cbeam_core::discretization::{Formulation, QuadPolicy};
use cbeam_core::model::Discretization;
use cbeam_core::solver::solve;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn quarter_arc(c: &mut Criterion) {
    let model = Benchmark::QuarterArc.model(0.001, default_material(), DEFAULT_LOAD).unwrap();
    let mut group = c.benchmark_group("quarter_arc");
    for f in [Formulation::TimoshenkoP2p1, Formulation::TimoshenkoH3p2, Formulation::EulerBernoulliH3] {
        for n in [8, 32] {
            let disc = Discretization::uniform(&model, n, f, QuadPolicy::Reduced).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("assemble/{f}"), n), &disc, |b, d| {
                b.iter(|| assemble(black_box(&model), d).unwrap())
            });
            let system = assemble(&model, &disc).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("solve/{f}"), n), &system, |b, s| {
                b.iter(|| solve(black_box(s)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, quarter_arc);
criterion_main!(benches);
