use super::{abs_pow, CovarianceSpec, DominatingPolynomial};
use crate::error::{Error, Result};
use crate::limit_bounds::TestFunctionNorms;
use crate::quadrature::{self, Tolerance, NORMAL_CUTOFF};
use crate::report::{BoundReport, Combination, Metric};
use crate::special_functions::{abc_coeffs, half_gamma_ratio, mu_abs_moment, AbcVariant};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which of the three derivative bounds to evaluate: nonnegative definite
/// `Σ`, positive definite `Σ`, or the sharpened one-dimensional form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundVariant {
    I,
    Ii,
    Iii,
}

impl BoundVariant {
    pub fn label(self) -> &'static str {
        match self {
            BoundVariant::I => "i",
            BoundVariant::Ii => "ii",
            BoundVariant::Iii => "iii",
        }
    }
}

/// Labelled terms of a bound, in the order they are summed.
type Terms = Vec<(String, f64)>;

fn precondition(clause: &str) -> Error {
    Error::Precondition(clause.to_string())
}

fn check_dims(poly: &DominatingPolynomial, sigma: &CovarianceSpec, w: &[f64]) -> Result<()> {
    if poly.dim() != sigma.dim() || w.len() != sigma.dim() {
        return Err(Error::Invalid(format!(
            "dimension mismatch: polynomial {}, covariance {}, point {}",
            poly.dim(),
            sigma.dim(),
            w.len()
        )));
    }
    Ok(())
}

fn is_unit_variance_1d(sigma: &CovarianceSpec) -> bool {
    sigma.dim() == 1 && sigma.sigma_ii(0) == 1.0
}

/// `E|(Σ^{-1/2}Z)_l|`.
fn mean_abs_whitened(inverse_ll: f64) -> f64 {
    (2.0 * inverse_ll / PI).sqrt()
}

/// Bound on `|∂ⁿ f_h(w)|` for `g` in the class dominated by `P`.
pub fn bound_f(
    variant: BoundVariant,
    poly: &DominatingPolynomial,
    sigma: &CovarianceSpec,
    norms: &TestFunctionNorms,
    n: usize,
    w: &[f64],
) -> Result<BoundReport> {
    check_dims(poly, sigma, w)?;
    let (a, b) = (poly.a, poly.b);
    let mut report = BoundReport::new(
        Metric::SolutionDerivative,
        format!("solution-derivative/f/{}", variant.label()),
        Combination::Sum { factor: 1.0 },
    );
    match variant {
        BoundVariant::I => {
            if n < 1 {
                return Err(precondition("variant (i) requires n >= 1"));
            }
            let k = norms.h_n(n)? / n as f64;
            report.term("A", k * a);
            for (i, r) in poly.exponents.iter().enumerate() {
                let s = sigma.sigma_ii(i);
                let inner = abs_pow(w[i], *r) + abs_pow(s.sqrt(), *r) * mu_abs_moment(*r)?;
                report.term(format!("B[{i}]"), k * b * 2f64.powf(r / 2.0) * inner);
            }
            report.check("Sigma nonnegative definite", true);
        }
        BoundVariant::Ii => {
            if n < 2 {
                return Err(precondition("variant (ii) requires n >= 2"));
            }
            sigma
                .require_positive_definite("variant (ii)")
                .map_err(|_| precondition("variant (ii) requires Sigma positive definite"))?;
            let k = PI.sqrt() / 2.0 * half_gamma_ratio(n as f64) * norms.h_n(n - 1)?;
            if sigma.is_identity() {
                report.term("A", k * a);
                for (i, r) in poly.exponents.iter().enumerate() {
                    let inner = abs_pow(w[i], *r) + mu_abs_moment(r + 1.0)?;
                    report.term(format!("B[{i}]"), k * b * 2f64.powf(r / 2.0) * inner);
                }
            } else {
                let inv = sigma.inverse()?;
                let d = sigma.dim();
                let mut best: Option<(f64, usize, Terms)> = None;
                for l in 0..d {
                    let el = mean_abs_whitened(inv[(l, l)]);
                    let mut terms = vec![("A".to_string(), k * a * el)];
                    for (i, r) in poly.exponents.iter().enumerate() {
                        let mixed = bivariate_abs_moment(sigma, l, i, *r)?;
                        let inner = abs_pow(w[i], *r) * el + mixed;
                        terms.push((format!("B[{i}]"), k * b * 2f64.powf(r / 2.0) * inner));
                    }
                    let total: f64 = terms.iter().map(|t| t.1).sum();
                    if best.as_ref().is_none_or(|(v, _, _)| total < *v) {
                        best = Some((total, l, terms));
                    }
                }
                let (_, l, terms) = best.expect("d >= 1");
                for (label, v) in terms {
                    report.term(label, v);
                }
                report.diagnostic("argmin_l", l as f64);
            }
            report.check("Sigma positive definite", true);
        }
        BoundVariant::Iii => {
            if n < 3 {
                return Err(precondition("variant (iii) requires n >= 3"));
            }
            if !is_unit_variance_1d(sigma) {
                return Err(precondition("variant (iii) requires d = 1 and Sigma = 1"));
            }
            let r = poly.exponents[0];
            let c = abc_coeffs(r, AbcVariant::Plain)?;
            let k = norms.h_n(n - 2)?;
            report.term("alpha*A", k * c.alpha * a);
            report.term(
                "B*beta*|w|^r",
                k * 2f64.powf(r / 2.0) * b * c.beta * abs_pow(w[0], r),
            );
            report.term("B*gamma", k * 2f64.powf(r / 2.0) * b * c.gamma);
        }
    }
    Ok(report.finish())
}

/// Bound on `|ψ_m^{(n)}(w)|`.
pub fn bound_psi(
    variant: BoundVariant,
    poly: &DominatingPolynomial,
    sigma: &CovarianceSpec,
    norms: &TestFunctionNorms,
    m: usize,
    n: usize,
    w: &[f64],
) -> Result<BoundReport> {
    check_dims(poly, sigma, w)?;
    let (a, b) = (poly.a, poly.b);
    let mut report = BoundReport::new(
        Metric::SolutionDerivative,
        format!("solution-derivative/psi/{}", variant.label()),
        Combination::Sum { factor: 1.0 },
    );
    match variant {
        BoundVariant::I => {
            if m < 1 || n < 1 {
                return Err(precondition("variant (i) requires m, n >= 1"));
            }
            let k = norms.h_n(m + n)? / (n * (m + n)) as f64;
            report.term("A", k * a);
            for (i, r) in poly.exponents.iter().enumerate() {
                let s = sigma.sigma_ii(i);
                let inner =
                    abs_pow(w[i], *r) + 2.0 * abs_pow(s.sqrt(), *r) * mu_abs_moment(*r)?;
                report.term(format!("B[{i}]"), k * b * 3f64.powf(r / 2.0) * inner);
            }
            report.check("Sigma nonnegative definite", true);
        }
        BoundVariant::Ii => {
            if m < 1 || n < 1 || m + n < 3 {
                return Err(precondition("variant (ii) requires m, n >= 1 and m + n >= 3"));
            }
            sigma
                .require_positive_definite("variant (ii)")
                .map_err(|_| precondition("variant (ii) requires Sigma positive definite"))?;
            let ratios = half_gamma_ratio(n as f64) * half_gamma_ratio((m + n) as f64);
            let h = norms.h_n(m + n - 2)?;
            if sigma.is_identity() {
                let k = (2.0 * PI).sqrt() / 4.0 * ratios * h;
                report.term("A", k * a);
                for (i, r) in poly.exponents.iter().enumerate() {
                    let inner = abs_pow(w[i], *r) + 2.0 * mu_abs_moment(r + 1.0)?;
                    report.term(format!("B[{i}]"), k * b * 3f64.powf(r / 2.0) * inner);
                }
            } else {
                let k = PI / 4.0 * ratios * h;
                let inv = sigma.inverse()?;
                let d = sigma.dim();
                let e: Vec<f64> = (0..d).map(|l| mean_abs_whitened(inv[(l, l)])).collect();
                let mut best: Option<(f64, (usize, usize), Terms)> = None;
                for kk in 0..d {
                    for l in 0..d {
                        let mut terms = vec![("A".to_string(), k * a * e[kk] * e[l])];
                        for (i, r) in poly.exponents.iter().enumerate() {
                            let mixed = bivariate_abs_moment(sigma, l, i, *r)?;
                            let inner = abs_pow(w[i], *r) * e[l] * e[kk] + 2.0 * e[kk] * mixed;
                            terms.push((format!("B[{i}]"), k * b * 3f64.powf(r / 2.0) * inner));
                        }
                        let total: f64 = terms.iter().map(|t| t.1).sum();
                        if best.as_ref().is_none_or(|(v, _, _)| total < *v) {
                            best = Some((total, (kk, l), terms));
                        }
                    }
                }
                let (_, (kk, l), terms) = best.expect("d >= 1");
                for (label, v) in terms {
                    report.term(label, v);
                }
                report.diagnostic("argmin_k", kk as f64);
                report.diagnostic("argmin_l", l as f64);
            }
            report.check("Sigma positive definite", true);
        }
        BoundVariant::Iii => {
            if m < 2 {
                return Err(precondition("variant (iii) requires m >= 2"));
            }
            if n != 3 {
                return Err(precondition("variant (iii) bounds the third derivative only (n = 3)"));
            }
            if !is_unit_variance_1d(sigma) {
                return Err(precondition("variant (iii) requires d = 1 and Sigma = 1"));
            }
            let r = poly.exponents[0];
            let c = abc_coeffs(r, AbcVariant::Tilde)?;
            let k = norms.h_n(m - 1)?;
            report.term("alpha*A", k * c.alpha * a);
            report.term(
                "B*beta*|w|^r",
                k * 3f64.powf(r / 2.0) * b * c.beta * abs_pow(w[0], r),
            );
            report.term("B*gamma", k * 3f64.powf(r / 2.0) * b * c.gamma);
        }
    }
    Ok(report.finish())
}

/// `E|U V^r|` for `(U, V) = ((Σ^{-1/2}Z)_l, (Σ^{1/2}Z)_i)`.
///
/// With symmetric square roots `Cov(U, V) = δ_{li}`, `Var U = (Σ^{-1})_{ll}`
/// and `Var V = σ_ii`. Independent pairs and diagonal `Σ` use closed forms;
/// the correlated case integrates `E|X| |ρX + √(1−ρ²)Y|^r` with the kink of
/// the inner integrand split out.
pub fn bivariate_abs_moment(sigma: &CovarianceSpec, l: usize, i: usize, r: f64) -> Result<f64> {
    let d = sigma.dim();
    if l >= d || i >= d {
        return Err(Error::Invalid(format!("indices ({l}, {i}) out of range for d = {d}")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Invalid(format!("r must be nonnegative, got {r}")));
    }
    sigma.require_positive_definite("bivariate_abs_moment")?;
    let var_v = sigma.sigma_ii(i);
    if sigma.is_diagonal() {
        let var_u = 1.0 / sigma.sigma_ii(l);
        return Ok(if l == i {
            var_v.powf((r - 1.0) / 2.0) * mu_abs_moment(r + 1.0)?
        } else {
            mean_abs_whitened(var_u) * var_v.powf(r / 2.0) * mu_abs_moment(r)?
        });
    }
    let inv = sigma.inverse()?;
    let var_u = inv[(l, l)];
    if l != i {
        return Ok(mean_abs_whitened(var_u) * var_v.powf(r / 2.0) * mu_abs_moment(r)?);
    }
    let rho = (1.0 / (var_u * var_v).sqrt()).min(1.0);
    let scale = var_u.sqrt() * var_v.powf(r / 2.0);
    Ok(scale * correlated_abs_moment(rho, r)?)
}

/// `E|X| |ρX + √(1−ρ²)Y|^r` for independent standard normals.
fn correlated_abs_moment(rho: f64, r: f64) -> Result<f64> {
    let s = (1.0 - rho * rho).max(0.0).sqrt();
    if s == 0.0 {
        return mu_abs_moment(r + 1.0);
    }
    let tol = Tolerance::new(1e-14, 1e-12);
    let inner = |c: f64| -> f64 {
        let f = |y: f64| (c + s * y).abs().powf(r) * quadrature::standard_normal_pdf(y);
        let kink = (-c / s).clamp(-NORMAL_CUTOFF, NORMAL_CUTOFF);
        quadrature::adaptive(f, -NORMAL_CUTOFF, kink, &tol).value
            + quadrature::adaptive(f, kink, NORMAL_CUTOFF, &tol).value
    };
    // Symmetric in x, so integrate over x > 0 and double.
    let v = quadrature::integrate(
        |x: f64| 2.0 * x * quadrature::standard_normal_pdf(x) * inner(rho * x),
        0.0,
        NORMAL_CUTOFF,
        &Tolerance::new(1e-13, 1e-11),
    )?;
    Ok(v)
}
