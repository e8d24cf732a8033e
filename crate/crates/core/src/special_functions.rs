//! Scalar special functions and constants consumed by the bound formulas.
//!
//! Γ and ln Γ are delegated to `libm`; the incomplete gamma function is
//! computed here (power series below `a + 1`, Lentz continued fraction above)
//! because the `T_r` closed form needs an overflow-free scaled variant.

use crate::error::{domain, Error, Result};
use crate::quadrature::{self, Tolerance};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("gamma_fn", format!("x must be positive and finite, got {x}")));
    }
    Ok(libm::tgamma(x))
}

pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma", format!("x must be positive and finite, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// `Γ(n/2) / Γ((n+1)/2)`, computed in log space.
pub fn half_gamma_ratio(n: f64) -> f64 {
    (libm::lgamma(n / 2.0) - libm::lgamma((n + 1.0) / 2.0)).exp()
}

fn check_incgamma_args(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("upper_incomplete_gamma", format!("a must be positive, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(domain("upper_incomplete_gamma", format!("x must be nonnegative, got {x}")));
    }
    Ok(())
}

/// Series for `e^{x} x^{-a} γ(a, x)`.
fn lower_series_scaled(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum
}

/// Continued fraction for `e^{x} x^{-a} Γ(a, x)` (modified Lentz).
fn upper_cf_scaled(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Upper incomplete gamma function `Γ(a, x) = ∫_x^∞ u^{a-1} e^{-u} du`.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    check_incgamma_args(a, x)?;
    if x == 0.0 {
        return gamma_fn(a);
    }
    if x < a + 1.0 {
        let lower = (a * x.ln() - x).exp() * lower_series_scaled(a, x);
        Ok(gamma_fn(a)? - lower)
    } else {
        Ok((a * x.ln() - x).exp() * upper_cf_scaled(a, x))
    }
}

/// `e^{x} Γ(a, x)`, finite for arguments where `Γ(a, x)` itself underflows.
pub fn upper_incomplete_gamma_scaled(a: f64, x: f64) -> Result<f64> {
    check_incgamma_args(a, x)?;
    if x < a + 1.0 {
        let lower = (a * x.ln()).exp() * lower_series_scaled(a, x);
        let full = if x == 0.0 { gamma_fn(a)? } else { gamma_fn(a)? * x.exp() };
        Ok(if x == 0.0 { full } else { full - lower })
    } else {
        Ok((a * x.ln()).exp() * upper_cf_scaled(a, x))
    }
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn regularized_lower_gamma(a: f64, x: f64) -> Result<f64> {
    check_incgamma_args(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a)?;
    if x < a + 1.0 {
        Ok((log_prefactor.exp() * lower_series_scaled(a, x)).min(1.0))
    } else {
        Ok(1.0 - log_prefactor.exp() * upper_cf_scaled(a, x))
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn regularized_upper_gamma(a: f64, x: f64) -> Result<f64> {
    check_incgamma_args(a, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a)?;
    if x < a + 1.0 {
        Ok((1.0 - log_prefactor.exp() * lower_series_scaled(a, x)).max(0.0))
    } else {
        Ok(log_prefactor.exp() * upper_cf_scaled(a, x))
    }
}

/// `μ_r = E|Z|^r = 2^{r/2} Γ((r+1)/2) / √π`.
pub fn mu_abs_moment(r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain("mu_abs_moment", format!("r must be nonnegative, got {r}")));
    }
    Ok((0.5 * r * std::f64::consts::LN_2 + libm::lgamma((r + 1.0) / 2.0)).exp() / PI.sqrt())
}

/// Stirling number of the second kind `{n brace k}`.
pub fn stirling2(n: u32, k: u32) -> Result<u128> {
    if n == 0 || k == 0 || k > n {
        return Err(domain("stirling2", format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(stirling_row(n)[k as usize])
}

/// Row `n` of the Stirling triangle, indexed by `k = 0..=n`.
fn stirling_row(n: u32) -> Vec<u128> {
    let n = n as usize;
    let mut row = vec![0u128; n + 1];
    row[0] = 1;
    for m in 1..=n {
        for k in (1..=m).rev() {
            row[k] = (k as u128) * row[k] + row[k - 1];
        }
        row[0] = 0;
    }
    row
}

pub fn bell(p: u32) -> Result<u128> {
    if p < 1 {
        return Err(domain("bell", "p must be at least 1"));
    }
    Ok(stirling_row(p).iter().sum())
}

/// `h_n = Σ_k {n brace k} ‖h^{(k)}‖` for `norms = [‖h'‖, …, ‖h^{(n)}‖]`.
pub fn h_weight(norms: &[f64]) -> Result<f64> {
    if norms.is_empty() {
        return Err(domain("h_weight", "norm list must be nonempty"));
    }
    if let Some(bad) = norms.iter().find(|v| !(**v >= 0.0)) {
        return Err(domain("h_weight", format!("norms must be nonnegative, got {bad}")));
    }
    let row = stirling_row(norms.len() as u32);
    Ok(norms
        .iter()
        .enumerate()
        .map(|(i, v)| row[i + 1] as f64 * v)
        .sum())
}

/// `c_r = max{1, 2^{r-1}}`.
pub fn c_const(r: f64) -> f64 {
    1f64.max(2f64.powf(r - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbcVariant {
    /// Constants of the third-derivative bound for `f`.
    Plain,
    /// Constants of the third-derivative bound for `ψ_m`.
    Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub variant: AbcVariant,
}

pub fn abc_coeffs(r: f64, variant: AbcVariant) -> Result<AbcCoefficients> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain("abc_coeffs", format!("r must be nonnegative, got {r}")));
    }
    let (alpha, beta, gamma) = match (variant, r <= 1.0) {
        (AbcVariant::Plain, true) => (4.0, 4.0, 2.0 * mu_abs_moment(r)?),
        (AbcVariant::Plain, false) => (r + 3.0, r + 5.0, (r + 1.0) * mu_abs_moment(r + 1.0)?),
        (AbcVariant::Tilde, true) => (10.0, 10.0, 10.0 * mu_abs_moment(r + 1.0)?),
        (AbcVariant::Tilde, false) => (
            r * r + r + 8.0,
            r * r + 2.0 * r + 18.0,
            (2.0 * r * r + r + 5.0) * mu_abs_moment(r + 1.0)?,
        ),
    };
    Ok(AbcCoefficients {
        alpha,
        beta,
        gamma,
        variant,
    })
}

/// `T_r(w) = w e^{w²/2} ∫_w^∞ t^r e^{-t²/2} dt`, via
/// `2^{(r-1)/2} w e^{w²/2} Γ((r+1)/2, w²/2)`.
pub fn t_r(r: f64, w: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain("t_r", format!("r must be nonnegative, got {r}")));
    }
    if !(w > 0.0) || !w.is_finite() {
        return Err(domain("t_r", format!("w must be positive, got {w}")));
    }
    let scaled = upper_incomplete_gamma_scaled((r + 1.0) / 2.0, 0.5 * w * w)?;
    Ok(2f64.powf((r - 1.0) / 2.0) * w * scaled)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IjKind {
    /// `I_{n,r}`
    Inr,
    /// `J_{n,r}`
    Jnr,
    /// `I_{m,n,r}`
    Imnr,
    /// `J_{m,n,r}`
    Jmnr,
}

impl IjKind {
    /// The closed-form cap each constant is known to respect.
    pub fn cap(self, r: f64) -> f64 {
        match self {
            IjKind::Inr | IjKind::Jnr => 2f64.powf(r / 2.0),
            IjKind::Imnr | IjKind::Jmnr => 3f64.powf(r / 2.0),
        }
    }
}

/// Sharpened replacements for the `2^{r/2}` and `3^{r/2}` factors, by
/// adaptive quadrature. Integrals over `t ∈ (0, 1)` are mapped to
/// `θ ∈ (0, π/2)` with `t = sin θ`, which removes the `√(1 - t²)` endpoint
/// singularities.
pub fn ij_constants(kind: IjKind, m: Option<u32>, n: u32, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("ij_constants", "n must be a positive integer"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain("ij_constants", format!("r must be nonnegative, got {r}")));
    }
    let tol = Tolerance::new(1e-14, 1e-12);
    let nf = n as f64;
    match (kind, m) {
        (IjKind::Inr, None) => {
            // n ∫ sin^{n-1}θ cos θ (sin θ + cos θ)^r dθ
            let v = quadrature::integrate(
                |th: f64| {
                    let (s, c) = th.sin_cos();
                    s.powi(n as i32 - 1) * c * (s + c).powf(r)
                },
                0.0,
                FRAC_PI_2,
                &tol,
            )?;
            Ok(nf * v)
        }
        (IjKind::Jnr, None) => {
            let pref = 2.0 / (PI.sqrt() * half_gamma_ratio(nf));
            let v = quadrature::integrate(
                |th: f64| {
                    let (s, c) = th.sin_cos();
                    s.powi(n as i32 - 1) * (s + c).powf(r)
                },
                0.0,
                FRAC_PI_2,
                &tol,
            )?;
            Ok(pref * v)
        }
        (IjKind::Imnr, Some(m)) if m >= 1 => {
            let mn = (m + n) as i32;
            let inner_tol = Tolerance::new(1e-15, 1e-13);
            let v = quadrature::integrate(
                |a: f64| {
                    let (t, ct) = a.sin_cos();
                    let inner = quadrature::adaptive(
                        |b: f64| {
                            let (s, cs) = b.sin_cos();
                            s.powi(n as i32 - 1) * cs * (s * t + t * cs + ct).powf(r)
                        },
                        0.0,
                        FRAC_PI_2,
                        &inner_tol,
                    )
                    .value;
                    t.powi(mn - 1) * ct * inner
                },
                0.0,
                FRAC_PI_2,
                &tol,
            )?;
            Ok(nf * (m + n) as f64 * v)
        }
        (IjKind::Jmnr, Some(m)) if m >= 1 => {
            let mnf = (m + n) as f64;
            let pref = 4.0 / (PI * half_gamma_ratio(nf) * half_gamma_ratio(mnf));
            let mn = (m + n) as i32;
            let inner_tol = Tolerance::new(1e-15, 1e-13);
            let v = quadrature::integrate(
                |a: f64| {
                    let (t, ct) = a.sin_cos();
                    let inner = quadrature::adaptive(
                        |b: f64| {
                            let (s, cs) = b.sin_cos();
                            s.powi(n as i32 - 1) * (s * t + t * cs + ct).powf(r)
                        },
                        0.0,
                        FRAC_PI_2,
                        &inner_tol,
                    )
                    .value;
                    t.powi(mn - 1) * inner
                },
                0.0,
                FRAC_PI_2,
                &tol,
            )?;
            Ok(pref * v)
        }
        _ => Err(domain(
            "ij_constants",
            format!("invalid index combination: kind {kind:?}, m = {m:?}"),
        )),
    }
}

/// `P(Y ≤ x)` for `Y ~ χ²₍₁₎`; returns 0 for negative `x`.
pub fn chi2_1_cdf(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    regularized_lower_gamma(0.5, 0.5 * x).expect("valid arguments")
}

/// `P(Y > x)` for `Y ~ χ²₍₁₎`, accurate in the upper tail.
pub fn chi2_1_sf(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    regularized_upper_gamma(0.5, 0.5 * x).expect("valid arguments")
}

pub fn chi2_1_pdf(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    (-0.5 * x).exp() / (2.0 * PI * x).sqrt()
}

/// `E[Y 1{Y ≤ x}]` for `Y ~ χ²₍₁₎`. Uses `y f₁(y) = f₃(y)`.
pub fn chi2_1_partial_mean(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    regularized_lower_gamma(1.5, 0.5 * x).expect("valid arguments")
}

/// `∫_0^x F(t) dt` for the χ²₍₁₎ CDF `F`.
pub fn chi2_1_cdf_integral(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    x * chi2_1_cdf(x) - chi2_1_partial_mean(x)
}

/// `∫_x^∞ (1 - F(t)) dt = E[(Y - x)⁺]`.
pub fn chi2_1_tail_integral(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0 - x.min(0.0);
    }
    let upper_mean = regularized_upper_gamma(1.5, 0.5 * x).expect("valid arguments");
    (upper_mean - x * chi2_1_sf(x)).max(0.0)
}

/// Quantile of `χ²₍₁₎`, by bisection refined with Newton steps.
pub fn chi2_1_quantile(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("probability out of range: {p}")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(f64::INFINITY);
    }
    // work on z = sqrt(x), F = erf(z / sqrt 2)
    let target = |z: f64| {
        let x = z * z;
        if p > 0.5 {
            (1.0 - p) - chi2_1_sf(x)
        } else {
            chi2_1_cdf(x) - p
        }
    };
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if target(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi.max(1e-300) {
            break;
        }
    }
    let z = 0.5 * (lo + hi);
    Ok(z * z)
}
