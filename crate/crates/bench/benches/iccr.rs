use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use iccr::experiment::{random_layer, trajectory_rng};
use iccr::{
    iccr_step, run_trajectory, Boundary, ExperimentConfig, MagicReport, OutcomePolicy,
    VariationalConfig,
};
use iccr_bench::evolved;

const SIZES: [usize; 3] = [128, 256, 512];

fn prepend_layer(c: &mut Criterion) {
    let mut group = c.benchmark_group("prepend_layer");
    for n in SIZES {
        let fixture = evolved(n, 8, 0.0, 1);
        let mut rng = trajectory_rng(2, 0);
        let layer = random_layer(&mut rng, n, 1, Boundary::Ring);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter_batched_ref(
                || fixture.tableau.clone(),
                |u| u.prepend(&layer).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn measurement_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("iccr_step");
    let var = VariationalConfig::default();
    for n in SIZES {
        let fixture = evolved(n, n / 4, 0.1, 3);
        let mut rng = trajectory_rng(4, 0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter_batched_ref(
                || (fixture.state.clone(), fixture.tableau.clone()),
                |(state, u)| {
                    iccr_step(state, u, n / 2, OutcomePolicy::BornSample, &mut rng, &var).unwrap()
                },
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn magic(c: &mut Criterion) {
    let fixture = evolved(1024, 16, 0.1, 5);
    c.bench_function("magic_report_1024", |b| {
        b.iter(|| MagicReport::compute(&fixture.state, &[1.0, 2.0, 3.0]).unwrap())
    });
}

fn trajectory(c: &mut Criterion) {
    let mut group = c.benchmark_group("trajectory_depth_20");
    group.sample_size(10);
    for n in SIZES {
        let cfg = ExperimentConfig {
            n_qubits: n,
            depth: 20,
            meas_rate: 0.1,
            record_every: 20,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| run_trajectory(cfg, 0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, prepend_layer, measurement_step, magic, trajectory);
criterion_main!(benches);
