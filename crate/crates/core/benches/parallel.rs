use cpnsurf_core::chain::HolomorphicCurve;
use cpnsurf_core::exec::Execution;
use cpnsurf_core::export::{surface_grid, Grid};
use cpnsurf_core::linalg::ZERO;
use cpnsurf_core::suite::{run_suite, SuiteConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const STRATEGIES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite_P3");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let cfg = SuiteConfig { samples: 10, exec, ..SuiteConfig::veronese(4).unwrap() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| run_suite("P3", &cfg).unwrap()));
    }
    group.finish();
}

fn grid(c: &mut Criterion) {
    let curve = HolomorphicCurve::veronese(4).unwrap();
    let grid = Grid { center: ZERO, radius: 2.0, resolution: 48 };
    let mut group = c.benchmark_group("surface_grid_48");
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| surface_grid(&curve, 1, &grid, 1e-9, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, suite, grid);
criterion_main!(benches);
