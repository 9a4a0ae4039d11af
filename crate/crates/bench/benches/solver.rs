use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mibound::{
    inner_minimize, linear_oracle, lower_bound, marginal_x, mi_gradient, qx_of_gamma, InnerProblem, JointDist,
    SolverConfig, ValidationPolicy,
};

fn joint(rows: &[&[f64]]) -> JointDist {
    JointDist::new(rows, ValidationPolicy::Strict).unwrap()
}

fn instances() -> Vec<(&'static str, JointDist, f64)> {
    vec![
        ("2x2", joint(&[&[0.017, 0.285], &[0.424, 0.274]]), 0.3),
        ("2x5", joint(&[&[0.090, 0.098, 0.207, 0.064, 0.026], &[0.239, 0.030, 0.104, 0.107, 0.035]]), 0.1),
        (
            "2x10",
            joint(&[
                &[0.101, 0.062, 0.025, 0.088, 0.005, 0.070, 0.069, 0.059, 0.080, 0.074],
                &[0.103, 0.006, 0.038, 0.002, 0.018, 0.079, 0.049, 0.032, 0.020, 0.020],
            ]),
            0.1,
        ),
    ]
}

fn bench_inner(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("inner_minimize");
    for (name, p, eps) in instances() {
        let prob = InnerProblem::new(p.clone(), qx_of_gamma(&marginal_x(&p), 0.25 * eps), eps).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &prob, |b, prob| {
            b.iter(|| inner_minimize(black_box(prob), &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_lmo(c: &mut Criterion) {
    let mut group = c.benchmark_group("linear_oracle");
    for (name, p, eps) in instances() {
        let prob = InnerProblem::new(p.clone(), marginal_x(&p), eps).unwrap();
        let grad = mi_gradient(&p, 1e-12);
        group.bench_with_input(BenchmarkId::from_parameter(name), &(prob, grad), |b, (prob, grad)| {
            b.iter(|| linear_oracle(black_box(grad), prob).unwrap())
        });
    }
    group.finish();
}

fn bench_bound(c: &mut Criterion) {
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("lower_bound_1000");
    group.sample_size(10);
    for (name, p, eps) in instances() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &p, |b, p| {
            b.iter(|| lower_bound(black_box(p), eps, 1000, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_inner, bench_lmo, bench_bound);
criterion_main!(benches);
