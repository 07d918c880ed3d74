use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lcn_core::energy::{interpolate, wstr_density, wstr_gradient, wstr_hessian};
use lcn_core::material::{Director, MaterialProgram};
use lcn_core::mesh::{build_edge_topology, generate_square_mesh, CreaseSet, DiagonalPattern, Rect};
use lcn_core::{EnergyModel, Solver, SolverConfig};
use std::hint::black_box;

const F: [[f64; 2]; 3] = [[0.9, 0.2], [-0.1, 1.1], [0.3, 0.4]];

fn density(c: &mut Criterion) {
    let m = [0.6, 0.8];
    c.bench_function("wstr_density", |b| b.iter(|| wstr_density(black_box(&F), m, 0.1, 1.0)));
    c.bench_function("wstr_gradient", |b| b.iter(|| wstr_gradient(black_box(&F), m, 0.1, 1.0)));
    c.bench_function("wstr_hessian", |b| b.iter(|| wstr_hessian(black_box(&F), m, 0.1, 1.0)));
}

fn model(n: usize) -> EnergyModel {
    let mesh = generate_square_mesh(n, n, Rect::new(0.0, 0.0, 1.0, 1.0), DiagonalPattern::CrissCross).unwrap();
    let topo = build_edge_topology(&mesh).unwrap();
    let creases = CreaseSet::empty(&mesh, &topo);
    let program = MaterialProgram::uniform(Director::Constant([0.6, 0.8]), 0.1, 1.0).unwrap();
    EnergyModel::from_program(mesh, topo, &creases, &program, 1.0).unwrap()
}

fn bump(model: &EnergyModel) -> Vec<f64> {
    interpolate(model.mesh(), |p| [p[0], p[1], 0.2 * p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1])])
        .as_flattened()
        .to_vec()
}

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assembly");
    for n in [16, 64] {
        let m = model(n);
        let y = bump(&m);
        group.bench_with_input(BenchmarkId::new("energy", n), &n, |b, _| b.iter(|| m.energy(black_box(&y))));
        group.bench_with_input(BenchmarkId::new("gradient", n), &n, |b, _| b.iter(|| m.gradient(black_box(&y))));
        group.bench_with_input(BenchmarkId::new("hessian", n), &n, |b, _| b.iter(|| m.hessian(black_box(&y))));
    }
    group.finish();
}

fn newton(c: &mut Criterion) {
    let mut group = c.benchmark_group("newton_step");
    group.sample_size(20);
    for n in [16, 32] {
        let m = model(n);
        let y = bump(&m);
        let mut solver = Solver::new(&m, SolverConfig::default()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| solver.newton_step(black_box(&y), &y).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, density, assembly, newton);
criterion_main!(benches);
