use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Highest order probed when determining how many moments match N(0, 1).
const MAX_PROBE_ORDER: u32 = 12;

/// User-supplied moment data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentTable {
    /// `(s, E|X|^s)` pairs at integer orders.
    pub abs: Vec<(f64, f64)>,
    /// `E[X^k]` for `k = 1, 2, …`.
    pub signed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum MomentFamily {
    /// `X = (I − p₁)/√(p₁p₂)` with `I ~ Bernoulli(p₁)`.
    BernoulliStandardized { p1: f64 },
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    UniformStandardized,
    Table(MomentTable),
}

/// Exact (or tabulated) moments of a standardized summand distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentOracle {
    family: MomentFamily,
    matching_order: u32,
}

/// `E[Z^k]` for `Z ~ N(0, 1)`.
pub fn normal_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        (1..k).step_by(2).map(f64::from).product()
    }
}

pub fn make_moment_oracle(family: MomentFamily) -> Result<MomentOracle> {
    match &family {
        MomentFamily::BernoulliStandardized { p1 } => {
            if !(*p1 > 0.0 && *p1 < 1.0) {
                return Err(Error::Invalid(format!("bernoulli p1 must lie in (0, 1), got {p1}")));
            }
        }
        MomentFamily::Table(t) => validate_table(t)?,
        MomentFamily::Rademacher | MomentFamily::UniformStandardized => {}
    }
    let mut oracle = MomentOracle {
        family,
        matching_order: 0,
    };
    let mut p = 0;
    for k in 1..=MAX_PROBE_ORDER {
        match oracle.signed_moment(k) {
            Ok(v) if (v - normal_moment(k)).abs() <= 1e-12 * normal_moment(k).max(1.0) => p = k,
            _ => break,
        }
    }
    if p < 2 {
        return Err(Error::Invalid("summand distribution is not standardized".into()));
    }
    oracle.matching_order = p;
    Ok(oracle)
}

fn validate_table(t: &MomentTable) -> Result<()> {
    let bad = |m: String| Err(Error::Invalid(format!("moment table: {m}")));
    if t.signed.len() < 2 {
        return bad("signed moments must include orders 1 and 2".into());
    }
    if t.signed[0].abs() > 1e-12 {
        return bad(format!("E[X] must be 0, got {}", t.signed[0]));
    }
    if (t.signed[1] - 1.0).abs() > 1e-12 {
        return bad(format!("E[X^2] must be 1, got {}", t.signed[1]));
    }
    let mut prev: Option<(f64, f64)> = None;
    for &(s, v) in &t.abs {
        if !(s >= 0.0) || s.fract() != 0.0 {
            return bad(format!("absolute moment orders must be nonnegative integers, got {s}"));
        }
        if !(v >= 0.0) || !v.is_finite() {
            return bad(format!("E|X|^{s} must be finite and nonnegative, got {v}"));
        }
        if let Some((ps, pv)) = prev {
            if s <= ps {
                return bad("absolute moment orders must be strictly increasing".into());
            }
            if ps >= 2.0 && v < pv * (1.0 - 1e-12) {
                return bad(format!("Lyapunov monotonicity fails between orders {ps} and {s}"));
            }
        }
        if s == 2.0 && (v - 1.0).abs() > 1e-12 {
            return bad(format!("E|X|^2 must be 1, got {v}"));
        }
        let k = s as usize;
        if k >= 1 && k <= t.signed.len() {
            let m = t.signed[k - 1];
            if m.abs() > v * (1.0 + 1e-12) {
                return bad(format!("|E[X^{k}]| = {} exceeds E|X|^{k} = {v}", m.abs()));
            }
            if k.is_multiple_of(2) && (m - v).abs() > 1e-12 * v.max(1.0) {
                return bad(format!("even moment E[X^{k}] = {m} differs from E|X|^{k} = {v}"));
            }
        }
        prev = Some((s, v));
    }
    Ok(())
}

impl MomentOracle {
    pub fn family(&self) -> &MomentFamily {
        &self.family
    }

    /// Largest `p` with `E[X^k] = E[Z^k]` for all `k ≤ p`.
    pub fn matching_order(&self) -> u32 {
        self.matching_order
    }

    pub fn family_tag(&self) -> &'static str {
        match self.family {
            MomentFamily::BernoulliStandardized { .. } => "bernoulli_standardized",
            MomentFamily::Rademacher => "rademacher",
            MomentFamily::UniformStandardized => "uniform_standardized",
            MomentFamily::Table(_) => "table",
        }
    }

    /// Whether `abs_moment(s)` is an exact value rather than an interpolation.
    pub fn is_exact_abs(&self, s: f64) -> bool {
        match &self.family {
            MomentFamily::Table(t) => s == 0.0 || t.abs.iter().any(|(o, _)| *o == s),
            _ => true,
        }
    }

    /// `E|X|^s`.
    pub fn abs_moment(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Invalid(format!("moment order must be nonnegative, got {s}")));
        }
        Ok(match &self.family {
            MomentFamily::BernoulliStandardized { p1 } => {
                let p2 = 1.0 - p1;
                (p1 * p2.powf(s) + p2 * p1.powf(s)) / (p1 * p2).powf(s / 2.0)
            }
            MomentFamily::Rademacher => 1.0,
            MomentFamily::UniformStandardized => 3f64.powf(s / 2.0) / (s + 1.0),
            MomentFamily::Table(t) => table_abs(t, s)?,
        })
    }

    /// `E[X^k]`, by two-point enumeration for the Bernoulli family.
    pub fn signed_moment(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        Ok(match &self.family {
            MomentFamily::BernoulliStandardized { p1 } => {
                let p2 = 1.0 - p1;
                let sd = (p1 * p2).sqrt();
                p1 * (p2 / sd).powi(k as i32) + p2 * (-p1 / sd).powi(k as i32)
            }
            MomentFamily::Rademacher => {
                if k.is_multiple_of(2) {
                    1.0
                } else {
                    0.0
                }
            }
            MomentFamily::UniformStandardized => {
                if k % 2 == 1 {
                    0.0
                } else {
                    3f64.powf(f64::from(k) / 2.0) / f64::from(k + 1)
                }
            }
            MomentFamily::Table(t) => *t.signed.get(k as usize - 1).ok_or_else(|| {
                Error::Invalid(format!("moment table has no signed moment of order {k}"))
            })?,
        })
    }
}

/// Log-linear interpolation between tabulated orders, anchored at `E|X|^0 = 1`.
fn table_abs(t: &MomentTable, s: f64) -> Result<f64> {
    if let Some((_, v)) = t.abs.iter().find(|(o, _)| *o == s) {
        return Ok(*v);
    }
    let mut points = vec![(0.0, 1.0)];
    points.extend(t.abs.iter().copied().filter(|(o, _)| *o > 0.0));
    let upper = points.iter().position(|(o, _)| *o > s).ok_or_else(|| {
        Error::Invalid(format!("moment table does not reach order {s}; the moment may be infinite"))
    })?;
    let (a, va) = points[upper - 1];
    let (b, vb) = points[upper];
    if va == 0.0 || vb == 0.0 {
        return Ok(0.0);
    }
    let theta = (s - a) / (b - a);
    Ok((va.ln() * (1.0 - theta) + vb.ln() * theta).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bernoulli_matches_two_point_enumeration() {
        for p1 in [0.05, 0.3, 0.5, 0.77] {
            let o = make_moment_oracle(MomentFamily::BernoulliStandardized { p1 }).unwrap();
            let p2 = 1.0 - p1;
            let sd: f64 = (p1 * p2).sqrt();
            let (hi, lo) = (p2 / sd, -p1 / sd);
            for s in [0.5, 1.0, 2.0, 3.0, 4.5, 6.0] {
                let e = p1 * hi.abs().powf(s) + p2 * lo.abs().powf(s);
                assert_relative_eq!(o.abs_moment(s).unwrap(), e, max_relative = 1e-14);
            }
            for k in 1..=8u32 {
                let e = p1 * hi.powi(k as i32) + p2 * lo.powi(k as i32);
                assert_relative_eq!(o.signed_moment(k).unwrap(), e, max_relative = 1e-13, epsilon = 1e-14);
            }
            for m in 2..=8 {
                let bound = (p1 * p2).powf(1.0 - m as f64 / 2.0);
                assert!(o.abs_moment(m as f64).unwrap() <= bound * (1.0 + 1e-14));
            }
        }
        let o = make_moment_oracle(MomentFamily::BernoulliStandardized { p1: 0.3 }).unwrap();
        assert_relative_eq!(o.signed_moment(3).unwrap(), 0.4 / 0.21f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(o.signed_moment(3).unwrap(), 0.87287, epsilon = 1e-5);
        assert_eq!(o.matching_order(), 2);
        let half = make_moment_oracle(MomentFamily::BernoulliStandardized { p1: 0.5 }).unwrap();
        assert_eq!(half.signed_moment(3).unwrap(), 0.0);
        assert_eq!(half.matching_order(), 3);
        assert!(make_moment_oracle(MomentFamily::BernoulliStandardized { p1: 1.0 }).is_err());
    }

    #[test]
    fn symmetric_families() {
        let r = make_moment_oracle(MomentFamily::Rademacher).unwrap();
        assert_eq!(r.abs_moment(3.7).unwrap(), 1.0);
        assert_eq!(r.matching_order(), 3);
        let u = make_moment_oracle(MomentFamily::UniformStandardized).unwrap();
        assert_relative_eq!(u.abs_moment(2.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(u.signed_moment(4).unwrap(), 1.8, max_relative = 1e-15);
        assert_eq!(u.matching_order(), 3);
    }

    #[test]
    fn table_validation_and_interpolation() {
        let t = MomentTable {
            abs: vec![(1.0, 0.8), (2.0, 1.0), (3.0, 1.5), (4.0, 3.0)],
            signed: vec![0.0, 1.0, 0.0, 3.0],
        };
        let o = make_moment_oracle(MomentFamily::Table(t.clone())).unwrap();
        assert_eq!(o.matching_order(), 4);
        assert_eq!(o.abs_moment(3.0).unwrap(), 1.5);
        assert!(o.is_exact_abs(3.0));
        assert!(!o.is_exact_abs(3.5));
        assert_relative_eq!(o.abs_moment(3.5).unwrap(), (1.5f64 * 3.0).sqrt(), max_relative = 1e-14);
        assert!(o.abs_moment(5.0).is_err());

        let mut bad = t.clone();
        bad.signed[1] = 1.1;
        assert!(make_moment_oracle(MomentFamily::Table(bad)).is_err());
        let mut bad = t.clone();
        bad.abs[3].1 = 1.2;
        assert!(make_moment_oracle(MomentFamily::Table(bad)).is_err());
        let mut bad = t;
        bad.signed[2] = 2.0;
        assert!(make_moment_oracle(MomentFamily::Table(bad)).is_err());
    }
}
