use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use frac_l1::evolve::{discrete_kernel_apply_all, solve_forward_with, ContourSpec, SourceSpec};
use frac_l1::fem1d::{assemble, project_load};
use frac_l1::{make_weights, Execution, OperatorCoefficients, Profile, SpaceMesh1D, TimeGrid};

const MODES: [(&str, Execution); 2] = [
    ("parallel", Execution::Parallel),
    ("sequential", Execution::Sequential),
];

fn forward(c: &mut Criterion) {
    let sys = assemble(
        &SpaceMesh1D::unit(256).unwrap(),
        &OperatorCoefficients::laplacian(),
    )
    .unwrap();
    let g = project_load(sys.mesh(), &Profile::power(-0.49)).unwrap();
    let steps = 1024;
    let grid = TimeGrid::new(0.1, steps).unwrap();
    let w = make_weights(0.5, steps).unwrap();
    let source = SourceSpec::constant(g, steps);
    let mut group = c.benchmark_group("forward_solve");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, steps), |b| {
            b.iter(|| solve_forward_with(&sys, &w, &source, &grid, exec).unwrap())
        });
    }
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let sys = assemble(
        &SpaceMesh1D::unit(64).unwrap(),
        &OperatorCoefficients::laplacian(),
    )
    .unwrap();
    let v = project_load(sys.mesh(), &Profile::power(-0.49)).unwrap();
    let mut group = c.benchmark_group("kernel_contour");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 64), |b| {
            b.iter(|| {
                discrete_kernel_apply_all(&sys, 0.5, 1e-3, 63, &v, &ContourSpec::default(), exec)
                    .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, forward, kernel);
criterion_main!(benches);
