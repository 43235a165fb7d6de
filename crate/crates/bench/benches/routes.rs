use criterion::{black_box, criterion_group, criterion_main, Criterion};
use monoword::combinatorics::{exact_distribution_enumeration, tableaux_distribution};
use monoword::laguerre::{smallest_eigenvalue_prob_fredholm, DEFAULT_NODES};
use monoword::limits::{f0, f2, F0Method};
use monoword::painleve::painleve_determinant;
use monoword::series::series_distribution;
use monoword::toeplitz::{differentiation_residuals, toeplitz_det};
use monoword::{Parameters, SigmaOptions, ToeplitzContext, Which};

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    g.sample_size(10);
    g.bench_function("enumeration k=3 N=8", |b| {
        b.iter(|| exact_distribution_enumeration(3, black_box(8), Which::Increasing, 1 << 20))
    });
    g.bench_function("tableaux k=3 N=100", |b| {
        b.iter(|| tableaux_distribution(3, black_box(100), Which::Increasing, 100))
    });
    g.bench_function("series k=2 N=10", |b| {
        b.iter(|| series_distribution(2, black_box(10), Which::Increasing))
    });
    g.finish();
}

fn determinants(c: &mut Criterion) {
    let ctx = ToeplitzContext::new(8, 5, 2.0, Which::Increasing).unwrap();
    c.bench_function("toeplitz n=8 k=5", |b| {
        b.iter(|| toeplitz_det(black_box(&ctx)))
    });
    c.bench_function("identities n=8 k=5", |b| {
        b.iter(|| differentiation_residuals(black_box(&ctx), 1e-3))
    });
    let params = Parameters {
        n: 4,
        k: 4,
        which: Which::Increasing,
    };
    c.bench_function("painleve n=4 k=4 t=4", |b| {
        b.iter(|| painleve_determinant(params, black_box(4.0), &SigmaOptions::default()))
    });
    c.bench_function("fredholm n=5 k=5 t=5", |b| {
        b.iter(|| smallest_eigenvalue_prob_fredholm(5, 5, black_box(5.0), DEFAULT_NODES))
    });
}

fn limits(c: &mut Criterion) {
    let mut g = c.benchmark_group("limits");
    g.sample_size(10);
    g.bench_function("f0 k=3", |b| {
        b.iter(|| f0(black_box(1.5), 3, F0Method::Quadrature))
    });
    let grid: Vec<f64> = (0..=80).map(|i| -4.0 + 0.1 * i as f64).collect();
    g.bench_function("f2 81 points", |b| b.iter(|| f2(black_box(&grid), 1e-10)));
    g.finish();
}

criterion_group!(benches, exact, determinants, limits);
criterion_main!(benches);
