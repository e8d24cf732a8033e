//! Named `(g, h)` test functions with their derivative norms and dominating
//! polynomials, shared by the verification tools and the test suites.

use crate::error::{Error, Result};
use crate::stein_solution::{DominatingPolynomial, Parity, SmoothFunction};

const NORM_LEN: usize = 12;

pub const G_NAMES: &[&str] = &["linear", "quadratic", "cubic", "quartic", "sextic", "quadratic2d"];
pub const H_NAMES: &[&str] = &["identity", "sin", "cos", "exp_neg"];

/// `q!/(q−k)!`
fn falling(q: u32, k: u32) -> f64 {
    ((q - k + 1)..=q).map(f64::from).product()
}

/// `g(w) = w^q`.
pub fn monomial(q: u32) -> SmoothFunction {
    let parity = if q.is_multiple_of(2) { Parity::Even } else { Parity::Odd };
    SmoothFunction::univariate(
        format!("w^{q}"),
        move |x| x.powi(q as i32),
        move |k, x| {
            let k = k as u32;
            if k > q {
                0.0
            } else {
                falling(q, k) * x.powi((q - k) as i32)
            }
        },
        usize::MAX,
    )
    .with_parity(parity)
}

fn monomial_degree(name: &str) -> Option<u32> {
    match name {
        "linear" => Some(1),
        "quadratic" => Some(2),
        "cubic" => Some(3),
        "quartic" => Some(4),
        "sextic" => Some(6),
        _ => None,
    }
}

/// `g(w) = w_1² + w_2²`.
pub fn quadratic2d() -> SmoothFunction {
    SmoothFunction::multivariate(
        "quadratic2d",
        2,
        |w| w[0] * w[0] + w[1] * w[1],
        |idx, w| {
            Some(match idx {
                [i] => 2.0 * w[*i],
                [i, j] if i == j => 2.0,
                _ => 0.0,
            })
        },
        usize::MAX,
    )
    .with_parity(Parity::Even)
}

pub fn lookup_g(name: &str) -> Result<SmoothFunction> {
    if let Some(q) = monomial_degree(name) {
        return Ok(monomial(q).with_name(name));
    }
    match name {
        "quadratic2d" => Ok(quadratic2d()),
        _ => Err(Error::Invalid(format!(
            "unknown g '{name}'; known: {}",
            G_NAMES.join(", ")
        ))),
    }
}

pub fn sin() -> SmoothFunction {
    SmoothFunction::univariate(
        "sin",
        f64::sin,
        |k, x| match k % 4 {
            0 => x.sin(),
            1 => x.cos(),
            2 => -x.sin(),
            _ => -x.cos(),
        },
        usize::MAX,
    )
    .with_parity(Parity::Odd)
    .with_sup_norms(vec![1.0; NORM_LEN])
}

pub fn cos() -> SmoothFunction {
    SmoothFunction::univariate(
        "cos",
        f64::cos,
        |k, x| match k % 4 {
            0 => x.cos(),
            1 => -x.sin(),
            2 => -x.cos(),
            _ => x.sin(),
        },
        usize::MAX,
    )
    .with_parity(Parity::Even)
    .with_sup_norms(vec![1.0; NORM_LEN])
}

/// `h(x) = e^{-x}`; its norms are sup-norms over `x ≥ 0`, so it is only
/// paired with nonnegative `g`.
pub fn exp_neg() -> SmoothFunction {
    SmoothFunction::univariate(
        "exp_neg",
        |x| (-x).exp(),
        |k, x| if k % 2 == 0 { (-x).exp() } else { -(-x).exp() },
        usize::MAX,
    )
    .with_sup_norms(vec![1.0; NORM_LEN])
}

pub fn lookup_h(name: &str) -> Result<SmoothFunction> {
    match name {
        "identity" => Ok(SmoothFunction::identity()),
        "sin" => Ok(sin()),
        "cos" => Ok(cos()),
        "exp_neg" => Ok(exp_neg()),
        _ => Err(Error::Invalid(format!(
            "unknown h '{name}'; known: {}",
            H_NAMES.join(", ")
        ))),
    }
}

/// Dominating polynomial for the monomial `g = w^q` in the class of order `k`.
///
/// Star classes (used when `h = id`) only constrain `|g^{(k)}| = q!/(q−k)! |w|^{q−k}`.
/// Full classes need `|g^{(j)}|^{k/j} ≤ P` for `j = 1..k`; each such term is
/// `c_j |w|^{e_j}` with `e_j ≤ (q−1)k`, and is dominated by
/// `max_{e_j<R} c_j + c_1 |w|^R` with `R = (q−1)k`.
pub fn monomial_class_polynomial(q: u32, k: u32, star: bool) -> Result<DominatingPolynomial> {
    if k == 0 {
        return DominatingPolynomial::univariate(0.0, 0.0, 0.0);
    }
    if star {
        if k > q {
            return DominatingPolynomial::univariate(0.0, 0.0, 0.0);
        }
        let c = falling(q, k);
        return if q == k {
            DominatingPolynomial::univariate(c, 0.0, 0.0)
        } else {
            DominatingPolynomial::univariate(0.0, c, f64::from(q - k))
        };
    }
    let big_r = f64::from((q - 1) * k);
    if big_r == 0.0 {
        return DominatingPolynomial::univariate(1.0, 0.0, 0.0);
    }
    let mut a = 0.0f64;
    for j in 2..=k.min(q) {
        let c = falling(q, j).powf(f64::from(k) / f64::from(j));
        let e = f64::from(q - j) * f64::from(k) / f64::from(j);
        if e < big_r {
            a = a.max(c);
        }
    }
    let b = f64::from(q).powi(k as i32);
    DominatingPolynomial::univariate(a, b, big_r)
}

/// Dominating polynomial for a named `g` (monomials only).
pub fn class_polynomial(g_name: &str, k: u32, star: bool) -> Result<DominatingPolynomial> {
    let q = monomial_degree(g_name).ok_or_else(|| {
        Error::Unsupported(format!("no dominating polynomial registered for g '{g_name}'"))
    })?;
    monomial_class_polynomial(q, k, star)
}
