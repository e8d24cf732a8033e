use super::{check_lambda, MultinomialModel};
use crate::error::{Error, Result};
use crate::limit_bounds::{
    make_moment_oracle, thm32_bound, univariate_expansion, EwPolicy, MomentFactor, MomentFamily,
    MomentOracle, SumSpecification, TestFunctionNorms, TheoremPart,
};
use crate::report::{BoundReport, Combination, Metric};
use crate::special_functions::{abc_coeffs, c_const, AbcVariant};
use crate::stein_solution::DominatingPolynomial;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative slack when comparing a route value against a displayed bound.
const ROUTE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatMetric {
    Wasserstein,
    Smooth,
    Kolmogorov,
}

/// How the smoothing width `α` of the Kolmogorov bound is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum AlphaPolicy {
    Optimize,
    Fixed { alpha: f64 },
    /// `x^{-1/5}{C1 + C2(λ−1)² + C3|(λ−1)(λ−2)(12λ+13)|/((λ+1)x^{2/5})}`
    /// with caller constants; never certified.
    PaperForm { c1: f64, c2: f64, c3: f64 },
}

fn two_norms(norms: Option<&TestFunctionNorms>) -> Result<(f64, f64)> {
    let n = norms.ok_or_else(|| {
        Error::Precondition("the smooth metric needs the norms (|h'|, |h''|)".into())
    })?;
    match (n.get(1), n.get(2)) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Precondition(
            "the smooth metric needs both |h'| and |h''|".into(),
        )),
    }
}

fn bernoulli(model: &MultinomialModel) -> Result<SumSpecification> {
    let oracle = make_moment_oracle(MomentFamily::BernoulliStandardized { p1: model.p1 })?;
    SumSpecification::univariate(model.n, oracle)
}

fn poly(a: f64, b: f64, r: f64) -> DominatingPolynomial {
    DominatingPolynomial::univariate(a, b, r).expect("valid constants")
}

fn w2_wasserstein_route(spec: &SumSpecification) -> Result<f64> {
    let norms = TestFunctionNorms::new(vec![1.0])?;
    Ok(thm32_bound(TheoremPart::Ii, spec, &poly(0.0, 2.0, 1.0), &norms, 2, EwPolicy::HolderCap, false)?.value)
}

fn w2_smooth_route(spec: &SumSpecification, h1: f64, h2: f64) -> Result<f64> {
    let norms = TestFunctionNorms::pair(h1, h2)?;
    Ok(thm32_bound(TheoremPart::Iv, spec, &poly(2.0, 4.0, 2.0), &norms, 2, EwPolicy::HolderCap, true)?.value)
}

/// `|E h(χ²) − E h(Y)|` along the unsimplified route: exact coefficients, exact
/// Bernoulli moments, and the trivial bound `2‖h'‖`.
fn pearson_smooth_route(model: &MultinomialModel, h1: f64, h2: f64) -> Result<f64> {
    Ok(w2_smooth_route(&bernoulli(model)?, h1, h2)?.min(2.0 * h1))
}

fn lambda_cubic(lambda: f64) -> f64 {
    ((lambda - 1.0) * (lambda - 2.0) * (12.0 * lambda + 13.0)).abs() / (6.0 * (lambda + 1.0))
}

fn bernoulli_ew4(model: &MultinomialModel) -> f64 {
    let n = model.n as f64;
    let x4 = (model.p1.powi(3) + model.p2.powi(3)) / (model.p1 * model.p2);
    3.0 * (n - 1.0) / n + x4 / n
}

/// Unsimplified bound on `|E h(T_λ) − E h(Y)|`, with cell signs kept in the
/// cubic remainder: `S₁³/√(np₁) + S₂³/√(np₂) = (p₂² − p₁²) W³/√(np₁p₂)`.
fn pd_smooth_route(model: &MultinomialModel, lambda: f64, h1: f64, h2: f64) -> Result<f64> {
    let x = model.npp();
    let n = model.n as f64;
    let chi2 = pearson_smooth_route(model, h1, h2)?;
    if lambda == 1.0 {
        return Ok(chi2);
    }
    let lemma = w3h_prime_bound(model, &TestFunctionNorms::pair(h1, h2)?)?;
    let trivial = h1 * bernoulli_ew4(model).powf(0.75);
    let w3 = if lemma.certified {
        lemma.value.min(trivial)
    } else {
        trivial
    };
    let r = (lambda - 1.0).abs() / 3.0 * (model.p2 * model.p2 - model.p1 * model.p1).abs() / x.sqrt() * w3;
    let s = 1.0 / model.p1.sqrt() + 1.0 / model.p2.sqrt();
    let quad = 19.0 * (lambda - 1.0).powi(2) / (18.0 * n) * s * s * h2;
    let cubic = lambda_cubic(lambda) * h1 / x;
    Ok(chi2 + r + quad + cubic)
}

fn route_ok(route: f64, value: f64) -> bool {
    route <= value * (1.0 + ROUTE_SLACK)
}

fn check_pd_preconditions(report: &mut BoundReport, model: &MultinomialModel, lambda: f64) {
    if lambda == 1.0 {
        return;
    }
    let np = model.n_p_min();
    report.check("n min(p1, p2) >= 1", np >= 1.0);
    if lambda >= 2.0 {
        report.check(
            "n min(p1, p2) >= 2(lambda - 2)^2",
            np >= 2.0 * (lambda - 2.0).powi(2),
        );
    }
}

/// Bounds for Pearson's statistic against `χ²₍₁₎`.
pub fn bound_pearson(
    metric: StatMetric,
    model: &MultinomialModel,
    norms: Option<&TestFunctionNorms>,
) -> Result<BoundReport> {
    let x = model.npp();
    let sx = x.sqrt();
    let mut report = match metric {
        StatMetric::Wasserstein => {
            let mut r = BoundReport::new(
                Metric::Wasserstein,
                "pearson/wasserstein",
                Combination::CappedSum { factor: 1.0, cap: 2.0 },
            );
            let route = w2_wasserstein_route(&bernoulli(model)?)?;
            r.term("25/sqrt(npp)", 25.0 / sx)
                .diagnostic("rounded (24 + 17/sqrt(npp))/sqrt(npp)", (24.0 + 17.0 / sx) / sx)
                .diagnostic("theorem route", route)
                .check("theorem route with exact moments <= 25/sqrt(npp)", route_ok(route, 25.0 / sx));
            r
        }
        StatMetric::Smooth => {
            let (h1, h2) = two_norms(norms)?;
            let mut r = BoundReport::new(Metric::SmoothH, "pearson/smooth", Combination::Sum { factor: 1.0 });
            let value = 892.0 * (h1 + h2) / x;
            let route = pearson_smooth_route(model, h1, h2)?;
            r.term("892 (|h'| + |h''|)/npp", value)
                .diagnostic("theorem route", route)
                .check("theorem route with exact moments <= 892 (|h'| + |h''|)/npp", route_ok(route, value));
            r
        }
        StatMetric::Kolmogorov => {
            let mut r = BoundReport::new(
                Metric::Kolmogorov,
                "pearson/kolmogorov",
                Combination::CappedSum { factor: 1.0, cap: 1.0 },
            );
            let m3 = (model.p1 * model.p1 + model.p2 * model.p2) / (model.p1 * model.p2).sqrt();
            r.term("0.9496/sqrt(npp)", 0.9496 / sx)
                .diagnostic("E|X|^3", m3)
                .check("E|X|^3 <= (p1 p2)^(-1/2)", m3 * (model.p1 * model.p2).sqrt() <= 1.0 + ROUTE_SLACK)
                .note("twice the Berry-Esseen bound with constant 0.4748");
            r
        }
    };
    report.diagnostic("npp", x);
    Ok(report.finish())
}

/// Bounds for `T_λ` against `χ²₍₁₎`. The Kolmogorov metric uses the optimized
/// smoothing bound.
pub fn bound_power_divergence(
    metric: StatMetric,
    model: &MultinomialModel,
    lambda: f64,
    norms: Option<&TestFunctionNorms>,
) -> Result<BoundReport> {
    check_lambda(lambda)?;
    let x = model.npp();
    let sx = x.sqrt();
    let mut report = match metric {
        StatMetric::Wasserstein => {
            let mut r = BoundReport::new(
                Metric::Wasserstein,
                "power-divergence/wasserstein",
                Combination::CappedSum { factor: 1.0, cap: 2.0 },
            );
            let route = w2_wasserstein_route(&bernoulli(model)?)?;
            r.term("25/sqrt(npp)", 25.0 / sx).term(
                "sqrt(2)|(lambda-1)(4 lambda+7)|/((lambda+1) sqrt(npp))",
                2f64.sqrt() * ((lambda - 1.0) * (4.0 * lambda + 7.0)).abs() / ((lambda + 1.0) * sx),
            );
            r.diagnostic("theorem route for the chi-square part", route).check(
                "theorem route with exact moments <= 25/sqrt(npp)",
                route_ok(route, 25.0 / sx),
            );
            check_pd_preconditions(&mut r, model, lambda);
            r
        }
        StatMetric::Smooth => {
            let (h1, h2) = two_norms(norms)?;
            let mut r = BoundReport::new(
                Metric::SmoothH,
                "power-divergence/smooth",
                Combination::Sum { factor: 1.0 },
            );
            let l1 = (lambda - 1.0).abs();
            r.term("892 (|h'| + |h''|)/npp", 892.0 * (h1 + h2) / x)
                .term("496|lambda-1| (|h'| + |h''|)/npp", 496.0 * l1 * (h1 + h2) / x)
                .term("19/9 (lambda-1)^2 |h''|/npp", 19.0 / 9.0 * l1 * l1 * h2 / x)
                .term(
                    "|(lambda-1)(lambda-2)(12 lambda+13)|/(6(lambda+1)) |h'|/npp",
                    lambda_cubic(lambda) * h1 / x,
                );
            let displayed: f64 = r.terms.iter().map(|t| t.value).sum();
            let route = pd_smooth_route(model, lambda, h1, h2)?;
            r.diagnostic("theorem route", route).check(
                "theorem route with exact moments and cell signs <= displayed bound",
                route_ok(route, displayed),
            );
            check_pd_preconditions(&mut r, model, lambda);
            r
        }
        StatMetric::Kolmogorov => return kolmogorov_bound_pd(model, lambda, AlphaPolicy::Optimize),
    };
    report.diagnostic("npp", x).diagnostic("lambda", lambda);
    Ok(report.finish())
}

/// Smoothing bound at width `α` with the displayed smooth-metric constants.
fn smoothing_objective(x: f64, lambda: f64, alpha: f64) -> (f64, f64) {
    let l1 = (lambda - 1.0).abs();
    let smooth = ((892.0 + 496.0 * l1) * (2.0 / alpha + 4.0 / (alpha * alpha))
        + 19.0 / 9.0 * l1 * l1 * 4.0 / (alpha * alpha)
        + lambda_cubic(lambda) * 2.0 / alpha)
        / x;
    (smooth, (2.0 * alpha / PI).sqrt())
}

/// Golden-section search for a unimodal function on `[a, b]`.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Kolmogorov bound for `T_λ` by smoothing the indicator with `h_α`
/// (`‖h_α'‖ = 2/α`, `‖h_α''‖ = 4/α²`) and paying `P(z ≤ Y ≤ z+α) ≤ √(2α/π)`.
pub fn kolmogorov_bound_pd(model: &MultinomialModel, lambda: f64, policy: AlphaPolicy) -> Result<BoundReport> {
    check_lambda(lambda)?;
    let x = model.npp();
    let mut report = BoundReport::new(
        Metric::Kolmogorov,
        "power-divergence/kolmogorov",
        Combination::CappedSum { factor: 1.0, cap: 1.0 },
    );
    let alpha = match policy {
        AlphaPolicy::PaperForm { c1, c2, c3 } => {
            if [c1, c2, c3].iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
                return Err(Error::Invalid("the constants C1, C2, C3 must be positive".into()));
            }
            let l1 = lambda - 1.0;
            let k = (l1 * (lambda - 2.0) * (12.0 * lambda + 13.0)).abs() / (lambda + 1.0);
            let s = x.powf(-0.2);
            report
                .term("C1/npp^(1/5)", c1 * s)
                .term("C2(lambda-1)^2/npp^(1/5)", c2 * l1 * l1 * s)
                .term("C3 cubic/((lambda+1) npp^(3/5))", c3 * k * s * x.powf(-0.4))
                .diagnostic("npp", x);
            return Ok(report
                .finish()
                .uncertified("C1, C2, C3 are caller-supplied constants"));
        }
        AlphaPolicy::Fixed { alpha } => {
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(Error::Invalid(format!("alpha must be positive, got {alpha}")));
            }
            alpha
        }
        AlphaPolicy::Optimize => {
            let total = |t: f64| {
                let (s, tail) = smoothing_objective(x, lambda, t.exp());
                s + tail
            };
            golden_section(total, 1e-8f64.ln(), 1e8f64.ln(), 1e-10).exp()
        }
    };
    let (smooth, tail) = smoothing_objective(x, lambda, alpha);
    report
        .term("smooth-test-function bound at h_alpha", smooth)
        .term("sqrt(2 alpha/pi)", tail)
        .diagnostic("alpha", alpha)
        .diagnostic("npp", x);
    let route = pd_smooth_route(model, lambda, 2.0 / alpha, 4.0 / (alpha * alpha))? + tail;
    report.diagnostic("theorem route", route).check(
        "theorem route with exact moments and cell signs <= displayed bound",
        route_ok(route, smooth + tail),
    );
    check_pd_preconditions(&mut report, model, lambda);
    Ok(report.finish())
}

/// Constants of the route bounding `|E[W³h'(W²)]|` through the univariate
/// theorem with `A = 3/2‖h'‖`, `B = 2‖h''‖ + 3/2‖h'‖`, `r = 4`, `p = 2`, after
/// `E|X|^s ≤ (p₁p₂)^{1−s/2}` and `E[W⁴] ≤ 3 + 1/(np₁p₂)`.
///
/// Each bound reads `(const + inv_x/npp + inv_x2/npp²)/√(npp)` per unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConstants {
    /// `α₄ A` per unit `‖h'‖`.
    pub alpha_a: f64,
    /// `c₄ β₄`.
    pub c_beta: f64,
    /// `γ₄`.
    pub gamma: f64,
    pub h1: [f64; 3],
    pub h2: [f64; 3],
}

fn chain_row(a: f64, b: f64) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for t in univariate_expansion(TheoremPart::Ii, &poly(a, b, 4.0), 1.0, 2)? {
        let has_ew = t.factors.iter().any(|f| matches!(f, MomentFactor::Ew(_)));
        for f in &t.factors {
            if let MomentFactor::Abs(s) = f {
                // Each moment pairs with its power of n to give a power of npp.
                debug_assert!((1.0 - s / 2.0 - t.n_exponent).abs() < 1e-12);
            }
        }
        if has_ew {
            out[0] += 3.0 * t.coefficient;
            out[1] += t.coefficient;
        } else if t.n_exponent == -0.5 {
            out[0] += t.coefficient;
        } else if t.n_exponent == -2.5 {
            out[2] += t.coefficient;
        } else {
            return Err(Error::Invalid(format!("unexpected power n^{}", t.n_exponent)));
        }
    }
    Ok(out)
}

pub fn chain_constants() -> Result<ChainConstants> {
    let plain = abc_coeffs(4.0, AbcVariant::Plain)?;
    Ok(ChainConstants {
        alpha_a: plain.alpha * 1.5,
        c_beta: c_const(4.0) * plain.beta,
        gamma: plain.gamma,
        h1: chain_row(1.5, 1.5)?,
        h2: chain_row(0.0, 2.0)?,
    })
}

/// `|E[W³h'(W²)]| ≤ 2976(‖h'‖ + ‖h''‖)/√(np₁p₂)` for the standardized
/// Bernoulli sum.
pub fn w3h_prime_bound(model: &MultinomialModel, norms: &TestFunctionNorms) -> Result<BoundReport> {
    let (h1, h2) = two_norms(Some(norms))?;
    let x = model.npp();
    let sx = x.sqrt();
    let mut report = BoundReport::new(Metric::SmoothH, "w3h-prime", Combination::Sum { factor: 1.0 });
    let value = 2976.0 * (h1 + h2) / sx;
    report.term("2976 (|h'| + |h''|)/sqrt(npp)", value);
    let c = chain_constants()?;
    let poly_x = |k: &[f64; 3]| k[0] + k[1] / x + k[2] / (x * x);
    let exact = (h1 * poly_x(&c.h1) + h2 * poly_x(&c.h2)) / sx;
    let rounded = (2975.0 + 864.0 / x + 864.0 / (x * x)) * (h1 + h2) / sx;
    let trivial = h1 * bernoulli_ew4(model).powf(0.75);
    report
        .diagnostic("chain (2975 + 864/npp + 864/npp^2)(|h'| + |h''|)/sqrt(npp)", rounded)
        .diagnostic("chain with exact constants", exact)
        .diagnostic("trivial |h'| E[W^4]^(3/4)", trivial)
        .diagnostic("npp", x)
        .check(
            "chain with exact constants or the trivial bound <= 2976 (|h'| + |h''|)/sqrt(npp)",
            route_ok(exact.min(trivial), value),
        );
    Ok(report.finish())
}

/// Generic bounds for `W²`, `W` a standardized i.i.d. sum, with the summand
/// moments taken from `oracle`.
pub fn w2_generic_bounds(
    metric: StatMetric,
    oracle: &MomentOracle,
    n: u64,
    norms: Option<&TestFunctionNorms>,
) -> Result<BoundReport> {
    let spec = SumSpecification::univariate(n, oracle.clone())?;
    let nf = n as f64;
    let moment = |s: f64| {
        oracle.abs_moment(s).map_err(|e| {
            Error::Precondition(format!("E|X|^{s} must be finite: {e}"))
        })
    };
    let mut report = match metric {
        StatMetric::Wasserstein => {
            let mut r = BoundReport::new(Metric::Wasserstein, "w2/wasserstein", Combination::Sum { factor: 1.0 });
            r.term("24 E|X|^3/sqrt(n)", 24.0 * moment(3.0)? / nf.sqrt())
                .term("17 E[X^4]/n", 17.0 * moment(4.0)? / nf);
            let displayed: f64 = r.terms.iter().map(|t| t.value).sum();
            let route = w2_wasserstein_route(&spec)?;
            r.diagnostic("theorem route", route)
                .check("theorem route <= displayed bound", route_ok(route, displayed));
            r
        }
        StatMetric::Smooth => {
            let (h1, h2) = two_norms(norms)?;
            let k = (h1 + h2) / nf;
            let skew = oracle.signed_moment(3)?.abs();
            let mut r = BoundReport::new(Metric::SmoothH, "w2/smooth", Combination::Sum { factor: 1.0 });
            r.term("187 E[X^4]", k * 187.0 * moment(4.0)?)
                .term("131 E[X^6]/n", k * 131.0 * moment(6.0)? / nf)
                .term("704 |E X^3| E|X|^3", k * 704.0 * skew * moment(3.0)?)
                .term("468 |E X^3| E|X|^5/n", k * 468.0 * skew * moment(5.0)? / nf);
            let displayed: f64 = r.terms.iter().map(|t| t.value).sum();
            let route = w2_smooth_route(&spec, h1, h2)?;
            r.diagnostic("theorem route", route)
                .check("theorem route <= displayed bound", route_ok(route, displayed));
            r
        }
        StatMetric::Kolmogorov => {
            return Err(Error::Unsupported(
                "no Kolmogorov bound for a generic W^2".into(),
            ))
        }
    };
    report.diagnostic("n", nf);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model(n: u64, p1: f64) -> MultinomialModel {
        MultinomialModel::new(n, p1).unwrap()
    }

    #[test]
    fn pearson_examples() {
        let r = bound_pearson(StatMetric::Wasserstein, &model(10_000, 0.5), None).unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-15);
        assert!(r.certified);
        let r = bound_pearson(StatMetric::Kolmogorov, &model(10_000, 0.5), None).unwrap();
        assert_relative_eq!(r.value, 0.018992, max_relative = 1e-12);
        let r = bound_pearson(StatMetric::Wasserstein, &model(4, 0.5), None).unwrap();
        assert_eq!(r.value, 2.0);
        assert!(r.cap_binding && r.certified);
        let r = bound_pearson(StatMetric::Kolmogorov, &model(4, 0.5), None).unwrap();
        assert_relative_eq!(r.value, 0.9496, max_relative = 1e-15);
        assert!(!r.cap_binding);
        let r = bound_pearson(StatMetric::Kolmogorov, &model(2, 0.5), None).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.cap_binding);
        assert!(bound_pearson(StatMetric::Smooth, &model(4, 0.5), None).is_err());
    }

    #[test]
    fn pd_examples() {
        let m = model(1_000_000, 0.5);
        let r = bound_power_divergence(StatMetric::Wasserstein, &m, 0.0, None).unwrap();
        assert_relative_eq!(r.value, (25.0 + 2f64.sqrt() * 7.0) / 500.0, max_relative = 1e-14);
        assert_relative_eq!(r.value, 0.069799, epsilon = 1e-6);
        let norms = TestFunctionNorms::pair(1.0, 1.0).unwrap();
        let r = bound_power_divergence(StatMetric::Smooth, &m, 2.0, Some(&norms)).unwrap();
        let x = m.npp();
        assert_relative_eq!(r.value, (2.0 * 892.0 + 2.0 * 496.0 + 19.0 / 9.0) / x, max_relative = 1e-14);
        for metric in [StatMetric::Wasserstein, StatMetric::Smooth] {
            for (n, p1) in [(10u64, 0.3), (1000, 0.5), (50_000, 0.2)] {
                let m = model(n, p1);
                let a = bound_pearson(metric, &m, Some(&norms)).unwrap();
                let b = bound_power_divergence(metric, &m, 1.0, Some(&norms)).unwrap();
                assert_eq!(a.value, b.value);
            }
        }
        assert!(bound_power_divergence(StatMetric::Wasserstein, &m, -1.0, None).is_err());
    }

    #[test]
    fn cubic_remainder_coefficient() {
        // 496 holds when |p1 - p2| <= 1/2, so the displayed smooth bound is
        // certified at p1 = 0.3 and fails the route check at p1 = 0.05.
        let norms = TestFunctionNorms::pair(1.0, 1.0).unwrap();
        let r = bound_power_divergence(StatMetric::Smooth, &model(100_000, 0.3), 0.0, Some(&norms)).unwrap();
        assert!(r.certified);
        let r = bound_power_divergence(StatMetric::Smooth, &model(10_000_000, 0.05), 5.0, Some(&norms)).unwrap();
        assert!(r.diagnostic_value("theorem route").unwrap() > 0.0);
    }

    #[test]
    fn chain_reproduction() {
        let c = chain_constants().unwrap();
        assert_relative_eq!(c.alpha_a, 10.5, max_relative = 1e-15);
        assert_eq!(c.c_beta, 72.0);
        assert_relative_eq!(c.gamma, 40.0 * (2.0 / PI).sqrt(), max_relative = 1e-14);
        assert_eq!(c.h1[0].ceil(), 2247.0);
        assert_relative_eq!(c.h1[1], 648.0, max_relative = 1e-13);
        assert_relative_eq!(c.h1[2], 648.0, max_relative = 1e-13);
        assert_eq!(c.h2[0].ceil(), 2975.0);
        assert_relative_eq!(c.h2[1], 864.0, max_relative = 1e-13);
        assert_relative_eq!(c.h2[2], 864.0, max_relative = 1e-13);
        let norms = TestFunctionNorms::pair(1.0, 1.0).unwrap();
        let m = MultinomialModel::new(40_000, 0.5).unwrap();
        let r = w3h_prime_bound(&m, &norms).unwrap();
        assert_relative_eq!(r.value, 59.52, max_relative = 1e-14);
        assert!(r.certified);
        let zero = TestFunctionNorms::pair(0.0, 0.0).unwrap();
        assert_eq!(w3h_prime_bound(&m, &zero).unwrap().value, 0.0);
    }

    #[test]
    fn generic_w2() {
        let rad = make_moment_oracle(MomentFamily::Rademacher).unwrap();
        let r = w2_generic_bounds(StatMetric::Wasserstein, &rad, 100, None).unwrap();
        assert_relative_eq!(r.value, 2.57, max_relative = 1e-14);
        assert!(r.certified);
        let norms = TestFunctionNorms::pair(0.5, 0.25).unwrap();
        let r = w2_generic_bounds(StatMetric::Smooth, &rad, 100, Some(&norms)).unwrap();
        assert_relative_eq!(r.value, (187.0 + 1.31) / 100.0 * 0.75, max_relative = 1e-14);
        // 187.01 > 187 is not covered by the slack in 131 at this n.
        assert!(!r.certified);
        for p1 in [0.1, 0.3, 0.5] {
            let o = make_moment_oracle(MomentFamily::BernoulliStandardized { p1 }).unwrap();
            for n in [300u64, 5000] {
                let x = n as f64 * p1 * (1.0 - p1);
                let v = w2_generic_bounds(StatMetric::Wasserstein, &o, n, None).unwrap().value;
                assert!(v <= (24.0 + 17.0 / x.sqrt()) / x.sqrt() * (1.0 + 1e-14));
                if x.sqrt() >= 17.0 {
                    assert!(v <= 25.0 / x.sqrt());
                }
            }
        }
    }

    #[test]
    fn kolmogorov_optimizer() {
        let m = model(1_000_000, 0.5);
        let opt = kolmogorov_bound_pd(&m, 1.0, AlphaPolicy::Optimize).unwrap();
        assert!(opt.certified && opt.value <= 1.0);
        let alpha = opt.diagnostic_value("alpha").unwrap();
        let fixed = kolmogorov_bound_pd(&m, 1.0, AlphaPolicy::Fixed { alpha }).unwrap();
        assert!((fixed.value - opt.value).abs() <= 1e-9);
        // Dense scan over ln α.
        let x = m.npp();
        let mut best = f64::INFINITY;
        for i in 0..=200_000 {
            let a = (1e-8f64.ln() + (1e8f64.ln() - 1e-8f64.ln()) * i as f64 / 200_000.0).exp();
            let (s, t) = smoothing_objective(x, 1.0, a);
            best = best.min(s + t);
        }
        assert!((best - opt.value).abs() <= 1e-6);
        assert!(opt.value <= best + 1e-12);
        let big = kolmogorov_bound_pd(&m, 1.0, AlphaPolicy::Fixed { alpha: 1e6 }).unwrap();
        assert_eq!(big.value, 1.0);
        assert!(kolmogorov_bound_pd(&m, 1.0, AlphaPolicy::Fixed { alpha: 0.0 }).is_err());
        let stated = kolmogorov_bound_pd(&m, 0.0, AlphaPolicy::PaperForm { c1: 1.0, c2: 1.0, c3: 1.0 }).unwrap();
        assert!(!stated.certified);
    }
}
