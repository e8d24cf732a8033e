use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use stein_bounds::battery::{lookup_g, lookup_h};
use stein_bounds::monte_carlo::{
    empirical_kolmogorov_chi2_1, empirical_wasserstein_chi2_1, sample_statistic, EstimatorConfig, RngSeed,
    StatisticKind,
};
use stein_bounds::quadrature::GaussHermite;
use stein_bounds::special_functions::{chi2_1_cdf, upper_incomplete_gamma};
use stein_bounds::stein_solution::{f_derivative, solve_f};
use stein_bounds::{
    bound_pearson, kolmogorov_bound_pd, AlphaPolicy, CovarianceSpec, QuadratureConfig, StatMetric,
};
use stein_bounds_bench::{pearson_model, pearson_samples, SEED};

fn special_functions(c: &mut Criterion) {
    c.bench_function("upper_incomplete_gamma", |b| {
        b.iter(|| upper_incomplete_gamma(black_box(2.5), black_box(3.7)).unwrap())
    });
    c.bench_function("chi2_1_cdf", |b| b.iter(|| chi2_1_cdf(black_box(1.3))));
}

fn quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("gauss_hermite_tensor");
    let rule = GaussHermite::new(64);
    for dim in [1usize, 2] {
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, &d| {
            b.iter(|| rule.expect_tensor(d, |z| z.iter().map(|v| v.cos()).product::<f64>()))
        });
    }
    group.finish();
}

fn stein_solution(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let s1 = CovarianceSpec::identity(1);
    let (g, h) = (lookup_g("quadratic").unwrap(), lookup_h("cos").unwrap());
    c.bench_function("solve_f (w^2, cos)", |b| {
        b.iter(|| solve_f(&h, &g, &s1, black_box(&[0.7]), &cfg).unwrap())
    });
    c.bench_function("f_derivative order 2 (w^2, cos)", |b| {
        b.iter(|| f_derivative(&h, &g, &s1, black_box(&[0.7]), &[0, 0], &cfg).unwrap())
    });
    let s2 = CovarianceSpec::identity(2);
    let (g2, h2) = (lookup_g("quadratic2d").unwrap(), lookup_h("exp_neg").unwrap());
    let mut group = c.benchmark_group("two_dimensional");
    group.sample_size(10);
    group.bench_function("solve_f (|w|^2, exp_neg)", |b| {
        b.iter(|| solve_f(&h2, &g2, &s2, black_box(&[0.5, -0.5]), &cfg).unwrap())
    });
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let model = pearson_model();
    c.bench_function("bound_pearson wasserstein", |b| {
        b.iter(|| bound_pearson(StatMetric::Wasserstein, black_box(&model), None).unwrap())
    });
    c.bench_function("kolmogorov_bound_pd optimize", |b| {
        b.iter(|| kolmogorov_bound_pd(black_box(&model), 2.0 / 3.0, AlphaPolicy::Optimize).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    let kind = StatisticKind::Pearson { model: pearson_model() };
    group.bench_function("sample 10^5 Pearson statistics", |b| {
        b.iter(|| sample_statistic(&kind, 100_000, RngSeed::new(SEED), 0).unwrap())
    });
    let samples = pearson_samples(100_000);
    let est = EstimatorConfig { bootstrap_resamples: 50, seed: SEED };
    group.bench_function("wasserstein estimate 10^5", |b| {
        b.iter(|| empirical_wasserstein_chi2_1(black_box(&samples), &est).unwrap())
    });
    group.bench_function("kolmogorov estimate 10^5", |b| {
        b.iter(|| empirical_kolmogorov_chi2_1(black_box(&samples), &est).unwrap())
    });
    group.finish();
}

criterion_group!(benches, special_functions, quadrature, stein_solution, bounds, monte_carlo);
criterion_main!(benches);
