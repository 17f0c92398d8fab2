use std::hint::black_box;

use contagg::jproduct::{join, Axis, Tensor, Variance};
use contagg::mobiusagg::mobius_potential;
use contagg::oracles::{random_formula, random_graph};
use contagg::proofkernel::{motzkin_certificate, robinson_certificate, verify_sos_certificate, Strategy};
use contagg::walkagg::{walk_potential, Derivatives, Method};
use contagg::Complex64;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn walk(c: &mut Criterion) {
    let mut group = c.benchmark_group("walk_potential");
    group.sample_size(10);
    let z = Complex64::new(3.0, 0.0);
    for n in [50, 100, 200] {
        let g = random_graph(n, 8.0 / n as f64, 1);
        let w = vec![-0.5; n];
        for (name, m) in [
            ("direct", Method::Direct),
            ("spectral", Method::Spectral),
            ("ps", Method::PatersonStockmeyer),
        ] {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| walk_potential(&g, z, black_box(&w), Derivatives::None, m).unwrap())
            });
        }
        group.bench_with_input(BenchmarkId::new("gradient", n), &n, |b, _| {
            b.iter(|| walk_potential(&g, z, black_box(&w), Derivatives::Gradient, Method::Auto).unwrap())
        });
    }
    group.finish();
}

fn mobius(c: &mut Criterion) {
    let mut group = c.benchmark_group("mobius_potential");
    group.sample_size(10);
    for n in [20, 50, 100] {
        let f = random_formula(n, 4 * n, 2);
        let x = vec![0.1; n];
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| mobius_potential(&f, Complex64::new(0.5, 0.0), black_box(&x)).unwrap())
        });
    }
    group.finish();
}

fn certificates(c: &mut Criterion) {
    let motzkin = motzkin_certificate();
    let robinson = robinson_certificate();
    c.bench_function("verify/motzkin/exact", |b| {
        b.iter(|| verify_sos_certificate(black_box(&motzkin), Strategy::ExactSphere).unwrap())
    });
    c.bench_function("verify/robinson/exact", |b| {
        b.iter(|| verify_sos_certificate(black_box(&robinson), Strategy::ExactSphere).unwrap())
    });
    c.bench_function("verify/motzkin/numeric", |b| {
        b.iter(|| verify_sos_certificate(black_box(&motzkin), Strategy::numeric_default()).unwrap())
    });
}

fn joins(c: &mut Criterion) {
    let d = 12;
    let cell = |i: &[usize]| Complex64::new(i.iter().sum::<usize>() as f64, 1.0);
    let a = Tensor::from_fn(
        vec![Axis::new("i", d, Variance::Co), Axis::new("k", d, Variance::Contra), Axis::new("f", d, Variance::Co)],
        cell,
    )
    .unwrap();
    let b = Tensor::from_fn(
        vec![Axis::new("k", d, Variance::Co), Axis::new("j", d, Variance::Contra), Axis::new("f", d, Variance::Contra)],
        cell,
    )
    .unwrap();
    c.bench_function("join/12^3", |bch| bch.iter(|| join(black_box(&a), black_box(&b), &["k", "f"]).unwrap()));
}

criterion_group!(benches, walk, mobius, certificates, joins);
criterion_main!(benches);
