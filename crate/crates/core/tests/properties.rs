use proptest::prelude::*;
use stein_bounds::quadrature::{integrate_to_infinity, standard_normal_pdf, Tolerance};
use stein_bounds::special_functions::{bell, mu_abs_moment, stirling2};
use stein_bounds::{
    bound_pearson, bound_power_divergence, kolmogorov_bound_pd, pearson_statistic, power_divergence,
    AlphaPolicy, CountVector, MultinomialModel, StatMetric, TestFunctionNorms,
};

const CASES: u32 = 10_000;

fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES, ..ProptestConfig::default() }
}

fn lambda() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), Just(2.0 / 3.0), Just(-0.5), -0.99f64..5.0]
}

fn model_and_counts() -> impl Strategy<Value = (MultinomialModel, CountVector)> {
    (1u64..5_000, 0.01f64..0.99)
        .prop_flat_map(|(n, p1)| (Just(n), Just(p1), 0..=n))
        .prop_map(|(n, p1, u1)| (MultinomialModel::new(n, p1).unwrap(), CountVector::new(u1, n - u1)))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn power_divergence_is_nonnegative((model, u) in model_and_counts(), l in lambda()) {
        let t = power_divergence(&u, &model, l).unwrap();
        prop_assert!(t >= 0.0 && t.is_finite(), "T = {t}");
    }

    #[test]
    fn lambda_one_is_pearson((model, u) in model_and_counts()) {
        let t = power_divergence(&u, &model, 1.0).unwrap();
        let chi2 = pearson_statistic(&u, &model).unwrap();
        prop_assert!((t - chi2).abs() <= 1e-12 * chi2.abs().max(1e-300));
    }

    #[test]
    fn bounds_do_not_increase_with_n(n in 1u64..100_000, extra in 1u64..100_000, p1 in 0.01f64..0.99, l in lambda()) {
        let small = MultinomialModel::new(n, p1).unwrap();
        let large = MultinomialModel::new(n + extra, p1).unwrap();
        let norms = TestFunctionNorms::pair(1.0, 0.5).unwrap();
        for metric in [StatMetric::Wasserstein, StatMetric::Smooth] {
            let a = bound_power_divergence(metric, &small, l, Some(&norms)).unwrap().value;
            let b = bound_power_divergence(metric, &large, l, Some(&norms)).unwrap().value;
            prop_assert!(b <= a * (1.0 + 1e-12), "{metric:?}: {b} > {a}");
        }
        let a = bound_pearson(StatMetric::Kolmogorov, &small, None).unwrap().value;
        let b = bound_pearson(StatMetric::Kolmogorov, &large, None).unwrap().value;
        prop_assert!(b <= a);
    }

    #[test]
    fn pearson_bounds_match_lambda_one(n in 1u64..1_000_000, p1 in 0.01f64..0.99, h1 in 0.0f64..10.0, h2 in 0.0f64..10.0) {
        let model = MultinomialModel::new(n, p1).unwrap();
        let norms = TestFunctionNorms::pair(h1, h2).unwrap();
        for metric in [StatMetric::Wasserstein, StatMetric::Smooth] {
            let a = bound_pearson(metric, &model, Some(&norms)).unwrap().value;
            let b = bound_power_divergence(metric, &model, 1.0, Some(&norms)).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12 * a.abs(), "{metric:?}: {a} vs {b}");
        }
    }

    #[test]
    fn optimized_alpha_beats_any_fixed_alpha(n in 1u64..10_000_000, p1 in 0.01f64..0.99, l in lambda(), log_alpha in -12.0f64..12.0) {
        let model = MultinomialModel::new(n, p1).unwrap();
        let best = kolmogorov_bound_pd(&model, l, AlphaPolicy::Optimize).unwrap().value;
        let fixed = kolmogorov_bound_pd(&model, l, AlphaPolicy::Fixed { alpha: log_alpha.exp() }).unwrap().value;
        prop_assert!(best <= fixed * (1.0 + 1e-9), "{best} > {fixed}");
    }

    #[test]
    fn stirling_recurrence((n, k) in (2u32..30).prop_flat_map(|n| (Just(n), 1..=n))) {
        let lhs = stirling2(n, k).unwrap();
        let below = if k < n { stirling2(n - 1, k).unwrap() } else { 0 };
        let diagonal = if k > 1 { stirling2(n - 1, k - 1).unwrap() } else { 0 };
        prop_assert_eq!(lhs, k as u128 * below + diagonal);
    }

    #[test]
    fn bell_is_the_row_sum(p in 1u32..30) {
        let sum: u128 = (1..=p).map(|k| stirling2(p, k).unwrap()).sum();
        prop_assert_eq!(bell(p).unwrap(), sum);
    }

    #[test]
    fn absolute_moments_match_quadrature(r in 0.0f64..10.0) {
        let tol = Tolerance::new(1e-14, 1e-11);
        let q = 2.0 * integrate_to_infinity(|z| z.powf(r) * standard_normal_pdf(z), 0.0, &tol).unwrap();
        let mu = mu_abs_moment(r).unwrap();
        prop_assert!((q - mu).abs() <= 1e-9 * mu, "r = {r}: {q} vs {mu}");
    }
}
