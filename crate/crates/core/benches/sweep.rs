use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use roadmatch::{run_amplitude_sweep, Execution, ExperimentConfig, SweepMode};

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("amplitude_sweep");
    group.sample_size(10);
    for mode in [SweepMode::Analytic, SweepMode::Empirical] {
        for execution in [Execution::Sequential, Execution::Parallel] {
            let cfg = ExperimentConfig {
                amplitudes: (1..=10).map(|i| i as f64).collect(),
                trials_per_amplitude: 2_000,
                mode,
                execution,
                ..ExperimentConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(format!("{mode:?}"), format!("{execution:?}")), &cfg, |b, cfg| {
                b.iter(|| run_amplitude_sweep(cfg).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
