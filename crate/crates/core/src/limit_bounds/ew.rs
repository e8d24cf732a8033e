use super::SumSpecification;
use crate::error::{Error, Result};
use crate::monte_carlo::{sample_w_sum, RngSeed};
use serde::{Deserialize, Serialize};

/// How to replace `E|W_k|^r` by an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum EwPolicy {
    /// `E|W|^r ≤ (E W²)^{r/2} = 1` for `r ≤ 2`.
    HolderCap,
    /// `E|W|^r ≤ (E W^{2m})^{r/(2m)}` with the exact even moment, `2m ≤ 8`.
    EvenMomentInterpolation,
    /// Sample mean plus five standard errors; not a certified bound.
    MonteCarloCi { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwBound {
    pub value: f64,
    pub certified: bool,
}

/// Moments `m_0..=m_k` of a sum of `n` i.i.d. copies from the summand moments,
/// via cumulants (`κ_S = n κ_X`).
fn sum_moments(moments: &[f64], n: f64) -> Vec<f64> {
    let k = moments.len() - 1;
    let binom = |a: usize, b: usize| -> f64 {
        (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
    };
    let mut kappa = vec![0.0; k + 1];
    for j in 1..=k {
        let mut s = moments[j];
        for i in 1..j {
            s -= binom(j - 1, i - 1) * kappa[i] * moments[j - i];
        }
        kappa[j] = s;
    }
    let kappa_sum: Vec<f64> = kappa.iter().map(|c| c * n).collect();
    let mut out = vec![0.0; k + 1];
    out[0] = 1.0;
    for j in 1..=k {
        let mut s = 0.0;
        for i in 1..=j {
            s += binom(j - 1, i - 1) * kappa_sum[i] * out[j - i];
        }
        out[j] = s;
    }
    out
}

/// Exact `E[W^{2m}]` for `W = n^{-1/2} Σ X_i`.
pub(crate) fn even_moment_of_w(spec: &SumSpecification, k: usize, two_m: u32) -> Result<f64> {
    let comp = &spec.components[k];
    let mut moments = vec![1.0];
    for j in 1..=two_m {
        moments.push(comp.oracle.signed_moment(j)?);
    }
    let n = comp.n as f64;
    let raw = sum_moments(&moments, n)[two_m as usize];
    Ok(raw / n.powf(f64::from(two_m) / 2.0))
}

/// Upper bound on `E|W_k|^r`.
pub fn ew_moment_upper(spec: &SumSpecification, k: usize, r: f64, policy: EwPolicy) -> Result<EwBound> {
    if k >= spec.dim() {
        return Err(Error::Invalid(format!("component {k} out of range")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Invalid(format!("r must be nonnegative, got {r}")));
    }
    if r == 0.0 {
        return Ok(EwBound { value: 1.0, certified: true });
    }
    match policy {
        EwPolicy::HolderCap => {
            if r > 2.0 {
                return Err(Error::Unsupported(format!(
                    "the Holder cap covers r <= 2 only (got r = {r}); use even-moment interpolation"
                )));
            }
            Ok(EwBound { value: 1.0, certified: true })
        }
        EwPolicy::EvenMomentInterpolation => {
            if r > 8.0 {
                return Err(Error::Unsupported(format!(
                    "even-moment interpolation covers r <= 8 only (got r = {r})"
                )));
            }
            let two_m = (2.0 * (r / 2.0).ceil()) as u32;
            if two_m == 2 {
                return Ok(EwBound { value: 1.0, certified: true });
            }
            let m = even_moment_of_w(spec, k, two_m)?;
            Ok(EwBound {
                value: m.powf(r / f64::from(two_m)),
                certified: true,
            })
        }
        EwPolicy::MonteCarloCi { samples, seed } => {
            if samples < 2 {
                return Err(Error::Invalid("Monte Carlo policy needs at least 2 samples".into()));
            }
            let comp = &spec.components[k];
            let draws = sample_w_sum(&comp.oracle, comp.n, samples, RngSeed::new(seed), k as u64)?;
            let vals: Vec<f64> = draws.iter().map(|w| w.abs().powf(r)).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
            Ok(EwBound {
                value: mean + 5.0 * (var / vals.len() as f64).sqrt(),
                certified: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{make_moment_oracle, MomentFamily};
    use super::*;
    use approx::assert_relative_eq;

    fn bern(p1: f64, n: u64) -> SumSpecification {
        SumSpecification::univariate(
            n,
            make_moment_oracle(MomentFamily::BernoulliStandardized { p1 }).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn fourth_moment_formula() {
        let s = bern(0.5, 100);
        let b = ew_moment_upper(&s, 0, 4.0, EwPolicy::EvenMomentInterpolation).unwrap();
        assert_relative_eq!(b.value, 2.98, max_relative = 1e-13);
        for (p1, n) in [(0.3, 7u64), (0.1, 50), (0.9, 3)] {
            let s = bern(p1, n);
            let x4 = s.components[0].oracle.signed_moment(4).unwrap();
            let e = even_moment_of_w(&s, 0, 4).unwrap();
            let nf = n as f64;
            assert_relative_eq!(e, 3.0 * (nf - 1.0) / nf + x4 / nf, max_relative = 1e-12);
            assert!(e <= 3.0 + x4 / nf);
        }
    }

    #[test]
    fn sixth_moment_by_enumeration() {
        // n = 3 Bernoulli summands: enumerate all 8 outcomes.
        let p1: f64 = 0.3;
        let s = bern(p1, 3);
        let sd = (p1 * (1.0 - p1)).sqrt();
        let mut e6 = 0.0;
        for mask in 0..8u32 {
            let mut prob = 1.0;
            let mut sum = 0.0;
            for b in 0..3 {
                if mask >> b & 1 == 1 {
                    prob *= p1;
                    sum += (1.0 - p1) / sd;
                } else {
                    prob *= 1.0 - p1;
                    sum -= p1 / sd;
                }
            }
            e6 += prob * (sum / 3f64.sqrt()).powi(6);
        }
        assert_relative_eq!(even_moment_of_w(&s, 0, 6).unwrap(), e6, max_relative = 1e-12);
    }

    #[test]
    fn policies() {
        let s = bern(0.3, 40);
        assert_eq!(ew_moment_upper(&s, 0, 1.0, EwPolicy::HolderCap).unwrap().value, 1.0);
        assert!(ew_moment_upper(&s, 0, 3.0, EwPolicy::HolderCap).is_err());
        assert!(ew_moment_upper(&s, 0, 9.0, EwPolicy::EvenMomentInterpolation).is_err());
        let b = ew_moment_upper(&s, 0, 3.0, EwPolicy::EvenMomentInterpolation).unwrap();
        assert!(b.certified && b.value > 1.0);
        let mc = ew_moment_upper(&s, 0, 3.0, EwPolicy::MonteCarloCi { samples: 20_000, seed: 1 }).unwrap();
        assert!(!mc.certified);
        assert!(mc.value <= b.value * 1.2);
    }
}
