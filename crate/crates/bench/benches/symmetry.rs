use criterion::{black_box, criterion_group, criterion_main, Criterion};

use barovort::solutions::{rh_generalized, RHWaveParams, WaveMode};
use barovort::symmetry::{
    adjoint, closure_check, decompose_in_span, flow, sample_points, standard_generators, structure_constants,
    subalgebra_catalog, transform_solution, ClassId, ClassParams, SymmetryGenerator,
};
use barovort::verify::{interior_points, vorticity_residual, ResidualMode};

fn algebra(c: &mut Criterion) {
    let pts = sample_points(40);
    let mut basis = standard_generators();
    basis.extend((0..3).map(SymmetryGenerator::z_power));
    c.bench_function("structure constants (8 generators)", |b| {
        b.iter(|| structure_constants(black_box(&basis), &pts, 1e-7).unwrap())
    });
    let ad = adjoint(&SymmetryGenerator::j2(), -std::f64::consts::FRAC_PI_2, &SymmetryGenerator::j1());
    let std = standard_generators();
    c.bench_function("adjoint decomposition", |b| b.iter(|| decompose_in_span(black_box(&ad), &std, &pts).unwrap()));
    let params = ClassParams::parse("kappa=1.5,lambda=0;0.7,m=1;0").unwrap();
    let sub = subalgebra_catalog(ClassId::Class(6), &params).unwrap();
    c.bench_function("closure class 6", |b| b.iter(|| closure_check(black_box(&sub), &pts).unwrap()));
}

fn residuals(c: &mut Criterion) {
    let wave = rh_generalized(RHWaveParams {
        n: 6,
        modes: vec![WaveMode::new(2, 1.0, 0.5), WaveMode::new(5, 0.5, 0.0)],
        a: 0.3,
        omega: 1.0,
    })
    .unwrap();
    let pts = interior_points(&wave, 200);
    c.bench_function("residual analytic 200 pts", |b| {
        b.iter(|| vorticity_residual(black_box(&wave), &pts, ResidualMode::Analytic).unwrap())
    });
    c.bench_function("residual finite difference 200 pts", |b| {
        b.iter(|| vorticity_residual(black_box(&wave), &pts, ResidualMode::finite_difference()).unwrap())
    });
    let rotated = transform_solution(&wave, &flow(&SymmetryGenerator::j2(), 0.4)).unwrap();
    c.bench_function("residual of rotated wave 200 pts", |b| {
        b.iter(|| vorticity_residual(black_box(&rotated), &pts, ResidualMode::Analytic).unwrap())
    });
}

criterion_group!(benches, algebra, residuals);
criterion_main!(benches);
