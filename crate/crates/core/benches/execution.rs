//! Sequential vs data-parallel execution of the per-frequency work.

use std::hint::black_box;

use aetomo::grid::make_grid;
use aetomo::internal_data::{ForwardModel, InternalData, Permittivity};
use aetomo::inversion::evaluate;
use aetomo::io::{make_phantom, PhantomSpec};
use aetomo::linearization::{adjoint_dot_test, Pairing};
use aetomo::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const N: usize = 51;
const FREQS: [f64; 4] = [5.0, 10.0, 15.0, 20.0];

fn setup() -> (Permittivity, ForwardModel) {
    let g = make_grid(N).unwrap();
    let spec = PhantomSpec {
        margin: 3,
        ..PhantomSpec::default_phantom()
    };
    (make_phantom(&spec, g).unwrap(), ForwardModel::unit_illumination(g).unwrap())
}

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn synthesis(c: &mut Criterion) {
    let (q, base) = setup();
    let mut group = c.benchmark_group("synthesize_data");
    group.sample_size(10);
    for (name, mode) in MODES {
        let m = base.clone().with_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| InternalData::synthesize(&m, black_box(&q), &FREQS, 0.0, 0).unwrap())
        });
    }
    group.finish();
}

fn gradient(c: &mut Criterion) {
    let (q, base) = setup();
    let data = InternalData::synthesize(&base, &q, &FREQS, 0.0, 0).unwrap();
    let q0 = Permittivity::unit(*q.grid(), 4.0, 3).unwrap();
    let mut group = c.benchmark_group("gradient_evaluation");
    group.sample_size(10);
    for (name, mode) in MODES {
        let m = base.clone().with_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let eval = evaluate(&m, black_box(&q0), &data).unwrap();
                eval.l2_gradient(&m).unwrap()
            })
        });
    }
    group.finish();
}

fn dot_trials(c: &mut Criterion) {
    let (q, base) = setup();
    let mut group = c.benchmark_group("adjoint_dot_trials");
    group.sample_size(10);
    for (name, mode) in MODES {
        let m = base.clone().with_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| adjoint_dot_test(&m, black_box(&q), 10.0, Pairing::L2, 8, 0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, synthesis, gradient, dot_trials);
criterion_main!(benches);
