use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dmpfem::dmp::{assumption_a_sweep_with, element_condition_check, level_set_profile, ElementCase};
use dmpfem::mesh::{acuteness_audit_with, generate_structured_2d, generate_structured_3d, Pattern};
use dmpfem::p1::{integrate_with, P1Field, QuadratureRule};
use dmpfem::solver::{assemble_q_with, picard_solve, CoefficientSet, SolveOptions};
use dmpfem::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble_q");
    let coeffs = CoefficientSet::quasilinear(|x| -x[0], |_| 0.0);
    for n in [32, 128] {
        let mesh = generate_structured_2d(n, n, Pattern::Crisscross, 0.0).unwrap();
        let w = P1Field::interpolate(&mesh, |x| (3.0 * x[0]).sin() * x[1]);
        let rule = QuadratureRule::new(2, 4).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| assemble_q_with(&mesh, &w, &coeffs, &rule, exec).unwrap())
            });
        }
    }
    let kuhn = generate_structured_3d(12, 12, 12).unwrap();
    let w = P1Field::zeros(&kuhn);
    let rule = QuadratureRule::new(3, 5).unwrap();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "kuhn-12"), |b| {
            b.iter(|| assemble_q_with(&kuhn, &w, &coeffs, &rule, exec).unwrap())
        });
    }
    group.finish();
}

fn checks(c: &mut Criterion) {
    let mesh = generate_structured_2d(64, 64, Pattern::RightDiagonal, 0.0).unwrap();
    let coeffs = CoefficientSet::poisson(|x| (5.0 * x[0]).sin() - 0.2, |x| x[0]);
    let solution = picard_solve(&mesh, &coeffs, &SolveOptions::default(), None).unwrap();
    let rule = QuadratureRule::new(2, 2).unwrap();
    let mut group = c.benchmark_group("checks");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("assumption_a_sweep", name), |b| {
            b.iter(|| assumption_a_sweep_with(&mesh, &solution.u_h, &coeffs, &rule, 1.0, exec).unwrap())
        });
        group.bench_function(BenchmarkId::new("element_condition", name), |b| {
            b.iter(|| {
                element_condition_check(&mesh, &coeffs, &rule, ElementCase::PoissonLike, 0.1, None, exec).unwrap()
            })
        });
        group.bench_function(BenchmarkId::new("level_set_profile", name), |b| {
            b.iter(|| level_set_profile(&mesh, &solution.u_h, solution.u_h.min(), exec))
        });
        group.bench_function(BenchmarkId::new("acuteness_audit", name), |b| {
            b.iter(|| acuteness_audit_with(&mesh, 1.0, exec))
        });
        let rule6 = QuadratureRule::new(2, 6).unwrap();
        group.bench_function(BenchmarkId::new("integrate", name), |b| {
            b.iter(|| integrate_with(&mesh, |x| (x[0] * x[1]).exp(), &rule6, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, assembly, checks);
criterion_main!(benches);
