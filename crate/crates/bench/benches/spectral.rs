use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oplab_core::{
    apply_function, generate, loewner_certificate, run_suite, HermitianMatrix, Instance, InstanceKind, InstanceSpec,
    ScalarFunctionSpec, SuiteConfig,
};

fn psd(n: usize, seed: u64) -> HermitianMatrix {
    match generate(&InstanceSpec::new(n, InstanceKind::Psd, seed)).expect("psd instance") {
        Instance::Single(m) => m,
        _ => unreachable!(),
    }
}

fn eigh(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigh");
    for n in [2, 4, 8, 16, 32] {
        let a = psd(n, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| black_box(a.eigh().unwrap()))
        });
    }
    group.finish();
}

fn functional_calculus(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_function");
    let fs = [
        ScalarFunctionSpec::power(0.5).unwrap(),
        ScalarFunctionSpec::log1p(),
        ScalarFunctionSpec::f_lambda(1.0).unwrap(),
    ];
    let a = psd(8, 3);
    for f in &fs {
        group.bench_with_input(BenchmarkId::from_parameter(f.label()), f, |b, f| {
            b.iter(|| black_box(apply_function(f, &a).unwrap()))
        });
    }
    group.finish();
}

fn loewner(c: &mut Criterion) {
    let f = ScalarFunctionSpec::power(0.3).unwrap();
    let mut group = c.benchmark_group("loewner_certificate");
    for k in [2, 6, 12] {
        let pts: Vec<f64> = (1..=k).map(|i| 0.5 * i as f64 + 0.1 * (i * i) as f64).collect();
        group.bench_with_input(BenchmarkId::from_parameter(k), &pts, |b, pts| {
            b.iter(|| black_box(loewner_certificate(&f, pts, 1e-8).unwrap()))
        });
    }
    group.finish();
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for name in ["thm-subadd-fwd", "gustafson", "hansen", "square-order"] {
        let cfg = SuiteConfig::new(4, 20, 1, 1e-8);
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| black_box(run_suite(name, cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, eigh, functional_calculus, loewner, suites);
criterion_main!(benches);
