use super::ew::{ew_moment_upper, EwPolicy};
use super::{SumSpecification, TestFunctionNorms};
use crate::error::{Error, Result};
use crate::report::{AssumptionStatus, BoundReport, Combination, Metric};
use crate::special_functions::{abc_coeffs, c_const, ln_gamma, mu_abs_moment, AbcVariant};
use crate::stein_solution::DominatingPolynomial;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parts (i)–(iv): multivariate and univariate bounds, each for general `g`
/// and for even `g` (the faster rate).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremPart {
    I,
    Ii,
    Iii,
    Iv,
}

impl TheoremPart {
    pub fn label(self) -> &'static str {
        match self {
            TheoremPart::I => "i",
            TheoremPart::Ii => "ii",
            TheoremPart::Iii => "iii",
            TheoremPart::Iv => "iv",
        }
    }

    fn univariate_only(self) -> bool {
        matches!(self, TheoremPart::Ii | TheoremPart::Iv)
    }

    fn needs_even(self) -> bool {
        matches!(self, TheoremPart::Iii | TheoremPart::Iv)
    }
}

/// A moment entering a univariate bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentFactor {
    /// `E|X|^s`
    Abs(f64),
    /// `|E[X^k]|`
    SignedAbs(u32),
    /// `E|W|^r`
    Ew(f64),
}

/// `coefficient · n^{n_exponent} · Π factors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicTerm {
    pub label: String,
    pub coefficient: f64,
    pub n_exponent: f64,
    pub factors: Vec<MomentFactor>,
}

fn term(label: &str, coefficient: f64, n_exponent: f64, factors: Vec<MomentFactor>) -> SymbolicTerm {
    SymbolicTerm {
        label: label.to_string(),
        coefficient,
        n_exponent,
        factors,
    }
}

fn factorial(p: u32) -> f64 {
    (1..=p).map(f64::from).product()
}

/// The univariate bounds (parts (ii) and (iv)) as a sum of moment monomials.
///
/// `h_weight` is `h_{p−1}` for part (ii) and `h_p` for part (iv).
pub fn univariate_expansion(
    part: TheoremPart,
    poly: &DominatingPolynomial,
    h_weight: f64,
    p: u32,
) -> Result<Vec<SymbolicTerm>> {
    if poly.dim() != 1 {
        return Err(Error::Precondition("univariate parts require d = 1".into()));
    }
    let (a, b, r) = (poly.a, poly.b, poly.exponents[0]);
    let c = c_const(r);
    let pf = f64::from(p);
    use MomentFactor::*;
    match part {
        TheoremPart::Ii => {
            let abc = abc_coeffs(r, AbcVariant::Plain)?;
            let k = (pf + 1.0) / factorial(p) * h_weight;
            let e = -(pf - 1.0) / 2.0;
            let s = 2f64.powf(r / 2.0) * b;
            Ok(vec![
                term("alpha*A", k * abc.alpha * a, e, vec![Abs(pf + 1.0)]),
                term("B*c*beta*E|W|^r", k * s * c * abc.beta, e, vec![Abs(pf + 1.0), Ew(r)]),
                term("B*c*beta/n^(r/2)", k * s * c * abc.beta, e - r / 2.0, vec![Abs(r + pf + 1.0)]),
                term("B*gamma", k * s * abc.gamma, e, vec![Abs(pf + 1.0)]),
            ])
        }
        TheoremPart::Iv => {
            let abc = abc_coeffs(r, AbcVariant::Plain)?;
            let tilde = abc_coeffs(r, AbcVariant::Tilde)?;
            let k = h_weight / factorial(p);
            let e = -pf / 2.0;
            let k1 = k * (2.0 * pf + 3.0) / (pf + 1.0);
            let s1 = 2f64.powf(r / 2.0) * b;
            let k2 = k * 1.5;
            let s2 = 3f64.powf(r / 2.0) * b;
            let skew = SignedAbs(p + 1);
            Ok(vec![
                term("alpha*A", k1 * abc.alpha * a, e, vec![Abs(pf + 2.0)]),
                term("B*c*beta*E|W|^r", k1 * s1 * c * abc.beta, e, vec![Abs(pf + 2.0), Ew(r)]),
                term("B*c*beta/n^(r/2)", k1 * s1 * c * abc.beta, e - r / 2.0, vec![Abs(r + pf + 2.0)]),
                term("B*gamma", k1 * s1 * abc.gamma, e, vec![Abs(pf + 2.0)]),
                term("skew*alpha~*A", k2 * tilde.alpha * a, e, vec![skew, Abs(3.0)]),
                term("skew*B*c*beta~*E|W|^r", k2 * s2 * c * tilde.beta, e, vec![skew, Abs(3.0), Ew(r)]),
                term("skew*B*c*beta~/n^(r/2)", k2 * s2 * c * tilde.beta, e - r / 2.0, vec![skew, Abs(r + 3.0)]),
                term("skew*B*gamma~", k2 * s2 * tilde.gamma, e, vec![skew, Abs(3.0)]),
            ])
        }
        _ => Err(Error::Unsupported(format!(
            "part ({}) has no univariate expansion",
            part.label()
        ))),
    }
}

/// Grouping key for [`collect_coefficients`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientKey {
    pub n_exponent: f64,
    pub abs_orders: Vec<f64>,
    pub signed_orders: Vec<u32>,
}

/// Merge terms with the same power of `n` and the same summand moments after
/// substituting `E|W|^r` by `ew(r)`.
pub fn collect_coefficients(
    terms: &[SymbolicTerm],
    ew: impl Fn(f64) -> f64,
) -> Vec<(CoefficientKey, f64)> {
    let mut out: Vec<(CoefficientKey, f64)> = Vec::new();
    for t in terms {
        let mut coef = t.coefficient;
        let mut abs_orders = Vec::new();
        let mut signed_orders = Vec::new();
        for f in &t.factors {
            match f {
                MomentFactor::Abs(s) => abs_orders.push(*s),
                MomentFactor::SignedAbs(k) => signed_orders.push(*k),
                MomentFactor::Ew(r) => coef *= ew(*r),
            }
        }
        abs_orders.sort_by(f64::total_cmp);
        signed_orders.sort_unstable();
        let key = CoefficientKey {
            n_exponent: t.n_exponent,
            abs_orders,
            signed_orders,
        };
        match out.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => *v += coef,
            None => out.push((key, coef)),
        }
    }
    out
}

/// Tracks whether every moment used was exact.
struct MomentSource<'a> {
    spec: &'a SumSpecification,
    policy: EwPolicy,
    exact: bool,
    ew_certified: bool,
}

impl<'a> MomentSource<'a> {
    fn abs(&mut self, j: usize, s: f64) -> Result<f64> {
        let o = &self.spec.components[j].oracle;
        let v = o.abs_moment(s).map_err(|e| {
            Error::Precondition(format!("E|X|^{s} must be finite for component {j}: {e}"))
        })?;
        self.exact &= o.is_exact_abs(s);
        Ok(v)
    }

    fn signed_abs(&mut self, j: usize, k: u32) -> Result<f64> {
        Ok(self.spec.components[j].oracle.signed_moment(k)?.abs())
    }

    fn ew(&mut self, j: usize, r: f64) -> Result<f64> {
        let b = ew_moment_upper(self.spec, j, r, self.policy)?;
        self.ew_certified &= b.certified;
        Ok(b.value)
    }

    /// `E|X_{ij}^a X_{ik}^b|`: a single moment when `j = k`, otherwise the
    /// product of marginals (independent components).
    fn cross(&mut self, j: usize, a: f64, k: usize, b: f64) -> Result<f64> {
        if j == k {
            self.abs(j, a + b)
        } else {
            Ok(self.abs(j, a)? * self.abs(k, b)?)
        }
    }
}

fn check_common(
    part: TheoremPart,
    spec: &SumSpecification,
    poly: &DominatingPolynomial,
    p: u32,
    g_even: bool,
) -> Result<()> {
    if p < 2 {
        return Err(Error::Precondition(format!("matching order p must be >= 2, got {p}")));
    }
    if poly.dim() != spec.dim() {
        return Err(Error::Invalid(format!(
            "polynomial has {} exponents for a {}-dimensional sum",
            poly.dim(),
            spec.dim()
        )));
    }
    if part.univariate_only() && spec.dim() != 1 {
        return Err(Error::Precondition(format!("part ({}) requires d = 1", part.label())));
    }
    if part.needs_even() {
        if !p.is_multiple_of(2) {
            return Err(Error::Precondition(format!(
                "part ({}) requires p even, got {p}",
                part.label()
            )));
        }
        if !g_even {
            return Err(Error::Precondition(format!(
                "part ({}) requires g to be an even function",
                part.label()
            )));
        }
    }
    for (j, c) in spec.components.iter().enumerate() {
        if c.oracle.matching_order() < p {
            return Err(Error::Precondition(format!(
                "component {j} matches only {} normal moments, fewer than p = {p}",
                c.oracle.matching_order()
            )));
        }
    }
    Ok(())
}

/// Bound on `|E h(g(W)) − E h(g(Z))|` for `Z ~ N(0, I_d)`.
///
/// `g_even` is the caller's assertion that `g` is even (parts (iii), (iv)).
pub fn thm32_bound(
    part: TheoremPart,
    spec: &SumSpecification,
    poly: &DominatingPolynomial,
    norms: &TestFunctionNorms,
    p: u32,
    policy: EwPolicy,
    g_even: bool,
) -> Result<BoundReport> {
    check_common(part, spec, poly, p, g_even)?;
    let pf = f64::from(p);
    let pu = p as usize;
    let mut src = MomentSource {
        spec,
        policy,
        exact: true,
        ew_certified: true,
    };
    let mut report = BoundReport::new(
        Metric::SmoothH,
        format!("limit-bound/part-{}", part.label()),
        Combination::Sum { factor: 1.0 },
    );
    report.check(format!("first {p} moments of every summand match N(0,1)"), true);
    if part.needs_even() {
        report.assume("g is even", AssumptionStatus::UserAsserted);
    }
    let (a, b) = (poly.a, poly.b);
    match part {
        TheoremPart::Ii | TheoremPart::Iv => {
            let h = if part == TheoremPart::Ii {
                norms.h_n(pu - 1)?
            } else {
                norms.h_n(pu)?
            };
            let n = spec.components[0].n as f64;
            for t in univariate_expansion(part, poly, h, p)? {
                let mut v = t.coefficient * n.powf(t.n_exponent);
                if v != 0.0 {
                    for f in &t.factors {
                        v *= match f {
                            MomentFactor::Abs(s) => src.abs(0, *s)?,
                            MomentFactor::SignedAbs(k) => src.signed_abs(0, *k)?,
                            MomentFactor::Ew(r) => src.ew(0, *r)?,
                        };
                    }
                }
                report.term(t.label, v);
            }
        }
        TheoremPart::I => {
            let k0 = (pf + 1.0) * PI.sqrt() * (ln_gamma((pf + 1.0) / 2.0)? - ln_gamma(pf / 2.0 + 1.0)?).exp()
                / (2.0 * factorial(p))
                * norms.h_n(pu)?;
            for j in 0..spec.dim() {
                let nj = spec.components[j].n as f64;
                let base = k0 * nj * nj.powf(-(pf + 1.0) / 2.0);
                let m = src.abs(j, pf + 1.0)?;
                report.term(format!("A[{j}]"), base * a * m);
                for (k, r) in poly.exponents.iter().enumerate() {
                    let nk = spec.components[k].n as f64;
                    let c = c_const(*r);
                    let ew = if b == 0.0 { 0.0 } else { src.ew(k, *r)? };
                    let inner = c * m * ew
                        + c * nk.powf(-r / 2.0) * src.cross(j, pf + 1.0, k, *r)?
                        + mu_abs_moment(r + 1.0)? * m;
                    report.term(format!("B[{j},{k}]"), base * b * 2f64.powf(r / 2.0) * inner);
                }
            }
        }
        TheoremPart::Iii => {
            let k0 = norms.h_n(pu + 2)? / factorial(p);
            let d = spec.dim();
            for j in 0..d {
                let nj = spec.components[j].n as f64;
                let base = k0 * nj * nj.powf(-(pf / 2.0 + 1.0)) * (2.0 * pf + 3.0)
                    / ((pf + 1.0) * (pf + 2.0));
                let m = src.abs(j, pf + 2.0)?;
                report.term(format!("A[{j}]"), base * a * m);
                for (k, r) in poly.exponents.iter().enumerate() {
                    let nk = spec.components[k].n as f64;
                    let c = c_const(*r);
                    let ew = if b == 0.0 { 0.0 } else { src.ew(k, *r)? };
                    let inner = c * m * ew
                        + c * nk.powf(-r / 2.0) * src.cross(j, pf + 2.0, k, *r)?
                        + mu_abs_moment(*r)? * m;
                    report.term(format!("B[{j},{k}]"), base * b * 2f64.powf(r / 2.0) * inner);
                }
            }
            let skew_coef = k0 * 3.0 * PI * (ln_gamma(pf / 2.0 + 2.0)? - ln_gamma((pf + 5.0) / 2.0)?).exp()
                / (8.0 * 2f64.sqrt());
            let mut skew = 0.0;
            for j in 0..d {
                let nj = spec.components[j].n as f64;
                skew += nj * src.signed_abs(j, p + 1)? * nj.powf(-(pf + 1.0) / 2.0);
            }
            let (mut part_a, mut part_b) = (0.0, 0.0);
            for k in 0..d {
                let nk = spec.components[k].n as f64;
                let wk = nk * nk.powf(-1.5);
                let m3 = src.abs(k, 3.0)?;
                part_a += wk * a * m3;
                for (t, r) in poly.exponents.iter().enumerate() {
                    let nt = spec.components[t].n as f64;
                    let c = c_const(*r);
                    let ew = if b == 0.0 { 0.0 } else { src.ew(t, *r)? };
                    let inner = c * m3 * ew
                        + c * nt.powf(-r / 2.0) * src.cross(k, 3.0, t, *r)?
                        + 2.0 * mu_abs_moment(r + 1.0)? * m3;
                    part_b += wk * b * 3f64.powf(r / 2.0) * inner;
                }
            }
            report.term("skew*A", skew_coef * skew * part_a);
            report.term("skew*B", skew_coef * skew * part_b);
        }
    }
    report.check("E|W|^r replaced by a certified upper bound", src.ew_certified);
    report.check("all summand moments exact (no table interpolation)", src.exact);
    Ok(report.finish())
}

/// Simplified bounds with a caller-supplied constant `C`; never certified.
pub fn cor33_bound(
    part: TheoremPart,
    spec: &SumSpecification,
    r_star: f64,
    norms: &TestFunctionNorms,
    p: u32,
    c: f64,
) -> Result<BoundReport> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Invalid(format!("constant C must be positive, got {c}")));
    }
    if !(r_star >= 0.0) {
        return Err(Error::Invalid(format!("r* must be nonnegative, got {r_star}")));
    }
    let poly = DominatingPolynomial::new(0.0, 0.0, vec![r_star; spec.dim()])?;
    check_common(part, spec, &poly, p, true)?;
    let pf = f64::from(p);
    let pu = p as usize;
    let d = spec.dim() as f64;
    let n_star = spec.components.iter().map(|c| c.n).min().expect("nonempty") as f64;
    let abs = |j: usize, s: f64| -> Result<f64> {
        let v = spec.components[j].oracle.abs_moment(s)?;
        if s >= 2.0 && v < 1.0 - 1e-12 {
            return Err(Error::Precondition(format!(
                "E|X|^{s} = {v} < 1 is impossible for a standardized summand"
            )));
        }
        Ok(v)
    };
    let mut report = BoundReport::new(
        Metric::SmoothH,
        format!("limit-bound/simplified-{}", part.label()),
        Combination::Sum { factor: 1.0 },
    );
    match part {
        TheoremPart::I => {
            let k = c * d * norms.h_tilde(pu)? / n_star.powf((pf + 1.0) / 2.0);
            for (j, comp) in spec.components.iter().enumerate() {
                report.term(format!("component {j}"), k * comp.n as f64 * abs(j, r_star + pf + 1.0)?);
            }
        }
        TheoremPart::Ii => {
            let n = spec.components[0].n as f64;
            let k = c * norms.h_tilde(pu - 1)? / n.powf((pf + 1.0) / 2.0);
            report.term("sum", k * n * abs(0, r_star + pf + 1.0)?);
        }
        TheoremPart::Iii | TheoremPart::Iv => {
            let k = if part == TheoremPart::Iii {
                c * d * norms.h_tilde(pu + 2)? / n_star.powf(pf / 2.0 + 2.0)
            } else {
                let n = spec.components[0].n as f64;
                c * norms.h_tilde(pu)? / n.powf(pf / 2.0 + 2.0)
            };
            for (j, cj) in spec.components.iter().enumerate() {
                for (l, cl) in spec.components.iter().enumerate() {
                    let skew = spec.components[j].oracle.signed_moment(p + 1)?.abs();
                    let inner = abs(j, r_star + pf + 2.0)? + skew * abs(l, r_star + 3.0)?;
                    report.term(format!("components ({j}, {l})"), k * cj.n as f64 * cl.n as f64 * inner);
                }
            }
        }
    }
    Ok(report
        .finish()
        .uncertified("the constant C is caller-supplied and not pinned down"))
}

#[cfg(test)]
mod tests {
    use super::super::{make_moment_oracle, MomentFamily, SumComponent};
    use super::*;
    use approx::assert_relative_eq;

    fn bern(p1: f64, n: u64) -> SumSpecification {
        SumSpecification::univariate(
            n,
            make_moment_oracle(MomentFamily::BernoulliStandardized { p1 }).unwrap(),
        )
        .unwrap()
    }

    fn poly(a: f64, b: f64, r: f64) -> DominatingPolynomial {
        DominatingPolynomial::univariate(a, b, r).unwrap()
    }

    #[test]
    fn wasserstein_square_coefficients() {
        let terms = univariate_expansion(TheoremPart::Ii, &poly(0.0, 2.0, 1.0), 1.0, 2).unwrap();
        let coefs = collect_coefficients(&terms, |_| 1.0);
        let get = |e: f64, s: f64| {
            coefs
                .iter()
                .find(|(k, _)| k.n_exponent == e && k.abs_orders == vec![s] && k.signed_orders.is_empty())
                .map(|(_, v)| *v)
                .unwrap()
        };
        assert_relative_eq!(get(-0.5, 3.0), 12.0 * 2f64.sqrt() + 12.0 / PI.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(get(-1.0, 4.0), 12.0 * 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn part_ii_pure_a() {
        let s = bern(0.3, 50);
        let n = TestFunctionNorms::new(vec![1.0]).unwrap();
        let rep = thm32_bound(TheoremPart::Ii, &s, &poly(1.0, 0.0, 1.0), &n, 2, EwPolicy::HolderCap, false).unwrap();
        let m3 = s.components[0].oracle.abs_moment(3.0).unwrap();
        assert_relative_eq!(rep.value, 1.5 * 4.0 * m3 / 50f64.sqrt(), max_relative = 1e-13);
        assert!(rep.certified);
    }

    #[test]
    fn bound_decreases_and_scales() {
        let n1 = TestFunctionNorms::new(vec![1.0, 1.0]).unwrap();
        let n2 = TestFunctionNorms::new(vec![2.0, 2.0]).unwrap();
        let mut last = f64::INFINITY;
        for n in [10u64, 100, 1000, 10_000] {
            let s = bern(0.3, n);
            let v = thm32_bound(TheoremPart::Ii, &s, &poly(1.0, 2.0, 1.0), &n1, 2, EwPolicy::HolderCap, false)
                .unwrap()
                .value;
            assert!(v < last);
            last = v;
            let v2 = thm32_bound(TheoremPart::Ii, &s, &poly(1.0, 2.0, 1.0), &n2, 2, EwPolicy::HolderCap, false)
                .unwrap()
                .value;
            assert_relative_eq!(v2, 2.0 * v, max_relative = 1e-13);
            let v3 = thm32_bound(TheoremPart::Ii, &s, &poly(2.0, 4.0, 1.0), &n1, 2, EwPolicy::HolderCap, false)
                .unwrap()
                .value;
            assert_relative_eq!(v3, 2.0 * v, max_relative = 1e-13);
        }
    }

    #[test]
    fn multivariate_cross_moments() {
        let o = make_moment_oracle(MomentFamily::BernoulliStandardized { p1: 0.3 }).unwrap();
        let u = make_moment_oracle(MomentFamily::UniformStandardized).unwrap();
        let spec = SumSpecification::new(vec![
            SumComponent { n: 40, oracle: o.clone() },
            SumComponent { n: 60, oracle: u.clone() },
        ])
        .unwrap();
        let p = DominatingPolynomial::new(0.0, 1.0, vec![1.0, 2.0]).unwrap();
        let norms = TestFunctionNorms::new(vec![1.0, 1.0]).unwrap();
        let rep = thm32_bound(TheoremPart::I, &spec, &p, &norms, 2, EwPolicy::HolderCap, false).unwrap();
        // B[0,1] uses the product E|X_0|³ E|X_1|² = E|X_0|³ (uniform has E X² = 1).
        // Unit norms give h_2 = S(2,1) + S(2,2) = 2; mu_3 = 2 sqrt(2/pi).
        let k0 = 3.0 * PI.sqrt() * (ln_gamma(1.5).unwrap() - ln_gamma(2.0).unwrap()).exp() / 4.0 * 2.0;
        let m3 = o.abs_moment(3.0).unwrap();
        let mu3 = 2.0 * (2.0 / PI).sqrt();
        let base = k0 * 40f64.powf(-0.5);
        let expected = base * 2.0 * (2.0 * m3 + 2.0 / 60.0 * m3 * u.abs_moment(2.0).unwrap() + mu3 * m3);
        let got = rep.terms.iter().find(|t| t.label == "B[0,1]").unwrap().value;
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        // d = 1 part (i) and part (ii) both evaluate on the same spec.
        let s = bern(0.3, 100);
        thm32_bound(TheoremPart::I, &s, &poly(1.0, 1.0, 1.0), &norms, 2, EwPolicy::HolderCap, false).unwrap();
        thm32_bound(TheoremPart::Ii, &s, &poly(1.0, 1.0, 1.0), &norms, 2, EwPolicy::HolderCap, false).unwrap();
    }

    #[test]
    fn even_parts_need_assertions() {
        let s = bern(0.5, 100);
        let n = TestFunctionNorms::new(vec![1.0; 4]).unwrap();
        let e = thm32_bound(TheoremPart::Iv, &s, &poly(2.0, 4.0, 2.0), &n, 2, EwPolicy::HolderCap, false).unwrap_err();
        assert!(e.to_string().contains("even"));
        let rep = thm32_bound(TheoremPart::Iii, &s, &poly(2.0, 4.0, 2.0), &n, 2, EwPolicy::HolderCap, true).unwrap();
        assert!(rep.value > 0.0);
        // p = 3 would need three matching moments; p1 = 0.3 has only two.
        let e = thm32_bound(TheoremPart::Ii, &bern(0.3, 10), &poly(1.0, 0.0, 0.0), &n, 3, EwPolicy::HolderCap, false)
            .unwrap_err();
        assert!(e.to_string().contains("matches only"));
    }

    #[test]
    fn simplified_bounds() {
        let r = make_moment_oracle(MomentFamily::Rademacher).unwrap();
        let spec = SumSpecification::new(vec![
            SumComponent { n: 100, oracle: r.clone() },
            SumComponent { n: 100, oracle: r.clone() },
            SumComponent { n: 100, oracle: r },
        ])
        .unwrap();
        let norms = TestFunctionNorms::new(vec![1.0, 0.5, 0.25]).unwrap();
        let rep = cor33_bound(TheoremPart::I, &spec, 1.0, &norms, 2, 2.0).unwrap();
        assert_relative_eq!(rep.value, 2.0 * 9.0 * 100f64.powf(-0.5) * 1.0 * 1.5, max_relative = 1e-13);
        assert!(!rep.certified);
        let s = bern(0.3, 64);
        let rep = cor33_bound(TheoremPart::Ii, &s, 1.0, &norms, 2, 1.0).unwrap();
        let m = s.components[0].oracle.abs_moment(4.0).unwrap();
        assert_relative_eq!(rep.value, 1.0 * 64f64.powf(-0.5) * m, max_relative = 1e-13);
        assert!(cor33_bound(TheoremPart::Ii, &s, 1.0, &norms, 2, 0.0).is_err());
        let sub_unit = make_moment_oracle(MomentFamily::Table(super::super::MomentTable {
            abs: vec![(2.0, 1.0), (4.0, 1.0), (5.0, 0.9)],
            signed: vec![0.0, 1.0],
        }));
        // A table violating Lyapunov is rejected up front.
        assert!(sub_unit.is_err());
    }
}
