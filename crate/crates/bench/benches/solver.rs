use std::hint::black_box;

use carleman_core::qr_solver::{assemble_initial, assemble_linearized, solve_free};
use carleman_core::{catalog, BenchmarkId, Grid2D, LinearMethod, Rect, SolverParams};
use criterion::{criterion_group, criterion_main, BenchmarkId as Id, Criterion};

fn assembly(c: &mut Criterion) {
    let spec = catalog(BenchmarkId::Hj4);
    let sp = SolverParams::default();
    let mut group = c.benchmark_group("assemble_linearized");
    for n in [20, 40] {
        let g = Grid2D::square(n, Rect::default()).unwrap();
        let u0 = carleman_core::qr_solver::solve_ls(&assemble_initial(&spec, &g, &sp).unwrap(), &sp).unwrap();
        group.bench_with_input(Id::from_parameter(n), &u0, |b, u| {
            b.iter(|| assemble_linearized(black_box(u), &spec, &sp).unwrap())
        });
    }
    group.finish();
}

fn solve(c: &mut Criterion) {
    let spec = catalog(BenchmarkId::Ql2);
    let mut group = c.benchmark_group("solve_initial");
    group.sample_size(20);
    for (name, method) in [("direct", LinearMethod::Direct), ("iterative", LinearMethod::Iterative)] {
        let sp = SolverParams { method, ..Default::default() };
        let g = Grid2D::square(20, Rect::default()).unwrap();
        let sys = assemble_initial(&spec, &g, &sp).unwrap();
        group.bench_function(name, |b| b.iter(|| solve_free(black_box(&sys), &sp).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, assembly, solve);
criterion_main!(benches);
