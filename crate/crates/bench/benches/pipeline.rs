use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pndil::matcore::herm_eig;
use pndil::realization::build_generating_unitary;
use pndil::verify::{verify_dilation, VerifyConfig};
use pndil::vonneumann::{torus_sup, TorusSamples};
use pndil_bench::{hermitian, polynomials, triple};

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("herm_eig");
    for n in [8, 32, 64] {
        let a = hermitian(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| herm_eig(black_box(a), 1e-10).unwrap())
        });
    }
    group.finish();
}

fn generating_unitary(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_generating_unitary");
    for (label, r) in [("nilpotent", 1.0), ("r0.9", 0.9)] {
        let (t, cert) = triple(3, 3, r, 2, 1);
        group.bench_function(label, |b| {
            b.iter(|| build_generating_unitary(black_box(&t), &cert, 1e-8).unwrap())
        });
    }
    group.finish();
}

fn von_neumann(c: &mut Criterion) {
    let (t, cert) = triple(3, 3, 0.9, 1, 1);
    let r = build_generating_unitary(&t, &cert, 1e-8).unwrap().realization;
    let polys = polynomials(10);
    c.bench_function("torus_sup/grid32", |b| {
        b.iter(|| torus_sup(black_box(&polys[0]), &r, 32).unwrap())
    });
    let samples = TorusSamples::new(&r, 32, 3);
    c.bench_function("torus_samples/sup_x10", |b| {
        b.iter(|| polys.iter().map(|p| samples.sup(black_box(p))).fold(0.0, f64::max))
    });
}

fn verification(c: &mut Criterion) {
    let (t, cert) = triple(3, 2, 0.9, 2, 3);
    let cfg = VerifyConfig::default();
    let mut group = c.benchmark_group("verify_dilation");
    group.sample_size(10);
    group.bench_function("jordan32", |b| {
        b.iter(|| verify_dilation(black_box(&t), &cert, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eigensolver, generating_unitary, von_neumann, verification);
criterion_main!(benches);
