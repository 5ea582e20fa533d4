use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orthocusp::classify::Method;
use orthocusp::exec::Execution;
use orthocusp::sweep::{sweep, SweepConfig};

fn surfaces_raster(c: &mut Criterion) {
    let mut group = c.benchmark_group("surfaces_300x300");
    for exec in [Execution::Sequential, Execution::Parallel] {
        let config = SweepConfig {
            spot_check_fraction: 0.0,
            execution: exec,
            ..SweepConfig::default()
        };
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &config,
            |b, cfg| b.iter(|| sweep(cfg).unwrap()),
        );
    }
    group.finish();
}

fn numeric_raster(c: &mut Criterion) {
    let mut group = c.benchmark_group("numeric_20x20");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let config = SweepConfig {
            n_d3: 20,
            n_d4: 20,
            mode: Method::Numeric,
            execution: exec,
            ..SweepConfig::default()
        };
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &config,
            |b, cfg| b.iter(|| sweep(cfg).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, surfaces_raster, numeric_raster);
criterion_main!(benches);
