use super::RngSeed;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, standard_normal_pdf, Tolerance};
use crate::special_functions::{
    chi2_1_cdf, chi2_1_cdf_integral, chi2_1_quantile, chi2_1_tail_integral,
};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Minimum sample count for the Wasserstein estimator.
pub const MIN_WASSERSTEIN_SAMPLES: usize = 100;

/// Experiment id reserved for bootstrap streams.
const BOOTSTRAP_STREAM: u64 = 0xB007_5742;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub estimate: f64,
    pub se: f64,
    pub samples: usize,
    pub metric: String,
}

/// Bootstrap settings. `bootstrap_resamples = 0` skips the bootstrap and
/// reports a zero standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub bootstrap_resamples: usize,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            bootstrap_resamples: 200,
            seed: 0,
        }
    }
}

/// Sorted distinct sample values with multiplicities, plus the χ²₍₁₎
/// quantities the estimators need at each value.
struct Atoms {
    values: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
    cdf: Vec<f64>,
    /// `∫_{v_i}^{v_{i+1}} F`.
    interval_integral: Vec<f64>,
    head: f64,
    tail: f64,
}

/// `∫_a^b F` given `F(a)`: through `∫_0^x F` below the median and through the
/// tail integral above it, avoiding cancellation for large arguments.
fn cdf_integral(a: f64, b: f64, fa: f64) -> f64 {
    if fa > 0.5 {
        ((b - a) - (chi2_1_tail_integral(a) - chi2_1_tail_integral(b))).max(0.0)
    } else {
        (chi2_1_cdf_integral(b) - chi2_1_cdf_integral(a)).max(0.0)
    }
}

impl Atoms {
    fn new(samples: &[f64]) -> Result<Self> {
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::Invalid("samples must be finite".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.par_sort_unstable_by(f64::total_cmp);
        let mut values = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for v in sorted {
            if values.last() == Some(&v) {
                *counts.last_mut().expect("nonempty") += 1;
            } else {
                values.push(v);
                counts.push(1);
            }
        }
        let cdf: Vec<f64> = values.iter().map(|&v| chi2_1_cdf(v)).collect();
        let interval_integral = values
            .windows(2)
            .zip(&cdf)
            .map(|(w, &fa)| cdf_integral(w[0], w[1], fa))
            .collect();
        let head = chi2_1_cdf_integral(values[0]);
        let tail = chi2_1_tail_integral(*values.last().expect("nonempty"));
        Ok(Self {
            values,
            counts,
            total: samples.len() as u64,
            cdf,
            interval_integral,
            head,
            tail,
        })
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    /// `∫|F_N − F|` for empirical weights `counts / total`.
    fn wasserstein(&self, counts: &[u64], total: u64) -> Result<f64> {
        let mut sum = self.head + self.tail;
        let mut cum = 0u64;
        for i in 0..self.len() - 1 {
            cum += counts[i];
            let c = cum as f64 / total as f64;
            let (a, b) = (self.values[i], self.values[i + 1]);
            let (fa, fb) = (self.cdf[i], self.cdf[i + 1]);
            let j = self.interval_integral[i];
            let d = b - a;
            let piece = if c <= fa {
                j - c * d
            } else if c >= fb {
                c * d - j
            } else {
                let x = chi2_1_quantile(c)?.clamp(a, b);
                let left = cdf_integral(a, x, fa);
                let right = j - left;
                c * (x - a) - left + right - c * (b - x)
            };
            sum += piece.max(0.0);
        }
        Ok(sum)
    }

    fn kolmogorov(&self, counts: &[u64], total: u64) -> f64 {
        let mut d = 0.0f64;
        let mut cum = 0u64;
        for i in 0..self.len() {
            let before = cum as f64 / total as f64;
            cum += counts[i];
            let after = cum as f64 / total as f64;
            d = d.max((after - self.cdf[i]).abs()).max((before - self.cdf[i]).abs());
        }
        d.min(1.0)
    }

    /// Multinomial resample of the atom counts. With many ties this draws one
    /// conditional binomial per atom; otherwise it resamples observations.
    fn resample<R: Rng>(&self, rng: &mut R) -> Result<Vec<u64>> {
        let mut out = vec![0u64; self.len()];
        if (self.len() as u64).saturating_mul(8) <= self.total {
            let mut left = self.total;
            let mut mass_left = self.total;
            for (i, &c) in self.counts.iter().enumerate() {
                if left == 0 {
                    break;
                }
                if i + 1 == self.len() || c == mass_left {
                    out[i] = left;
                    break;
                }
                let p = c as f64 / mass_left as f64;
                let draw = Binomial::new(left, p)
                    .map_err(|e| Error::Invalid(format!("bootstrap binomial: {e}")))?
                    .sample(rng);
                out[i] = draw;
                left -= draw;
                mass_left -= c;
            }
        } else {
            let mut ends = Vec::with_capacity(self.len());
            let mut acc = 0u64;
            for &c in &self.counts {
                acc += c;
                ends.push(acc);
            }
            for _ in 0..self.total {
                let k = rng.random_range(0..self.total);
                out[ends.partition_point(|&e| e <= k)] += 1;
            }
        }
        Ok(out)
    }

    fn bootstrap_se<F>(&self, cfg: &EstimatorConfig, stream: u64, stat: F) -> Result<f64>
    where
        F: Fn(&[u64]) -> Result<f64> + Sync,
    {
        if cfg.bootstrap_resamples == 0 {
            return Ok(0.0);
        }
        if cfg.bootstrap_resamples == 1 {
            return Err(Error::Invalid("the bootstrap needs at least 2 resamples".into()));
        }
        let seed = RngSeed::new(cfg.seed);
        let reps = (0..cfg.bootstrap_resamples)
            .into_par_iter()
            .map(|b| {
                let mut rng = seed.rng(BOOTSTRAP_STREAM ^ stream, b as u64);
                stat(&self.resample(&mut rng)?)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean = reps.iter().sum::<f64>() / reps.len() as f64;
        let var = reps.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (reps.len() - 1) as f64;
        Ok(var.sqrt())
    }
}

/// `W₁(F_N, χ²₍₁₎) = ∫|F_N − F|`, exact between order statistics plus the
/// analytic tail beyond the largest one; bootstrap standard error.
pub fn empirical_wasserstein_chi2_1(samples: &[f64], cfg: &EstimatorConfig) -> Result<DistanceEstimate> {
    if samples.len() < MIN_WASSERSTEIN_SAMPLES {
        return Err(Error::Precondition(format!(
            "the Wasserstein estimator needs at least {MIN_WASSERSTEIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let atoms = Atoms::new(samples)?;
    let estimate = atoms.wasserstein(&atoms.counts, atoms.total)?;
    let se = atoms.bootstrap_se(cfg, 1, |c| atoms.wasserstein(c, atoms.total))?;
    Ok(DistanceEstimate {
        estimate,
        se,
        samples: samples.len(),
        metric: "d_W".into(),
    })
}

/// One-sample Kolmogorov–Smirnov distance to `χ²₍₁₎`, with bootstrap standard error.
pub fn empirical_kolmogorov_chi2_1(samples: &[f64], cfg: &EstimatorConfig) -> Result<DistanceEstimate> {
    if samples.is_empty() {
        return Err(Error::Precondition("the KS estimator needs at least one sample".into()));
    }
    let atoms = Atoms::new(samples)?;
    let estimate = atoms.kolmogorov(&atoms.counts, atoms.total);
    let se = atoms.bootstrap_se(cfg, 2, |c| Ok(atoms.kolmogorov(c, atoms.total)))?;
    Ok(DistanceEstimate {
        estimate,
        se,
        samples: samples.len(),
        metric: "d_K".into(),
    })
}

/// Test functions on `[0, ∞)` with known `(‖h'‖, ‖h''‖)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "h", deny_unknown_fields)]
pub enum SmoothTest {
    Constant { value: f64 },
    Identity,
    /// `sin(a x)`
    Sin { a: f64 },
    /// `e^{-x}`
    ExpNeg,
    /// `1/(1 + x)`
    Reciprocal,
    /// The smoothed indicator `h_α` of `(−∞, z]`.
    Bump { alpha: f64, z: f64 },
}

impl SmoothTest {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SmoothTest::Constant { value } if !value.is_finite() => {
                Err(Error::Invalid("constant test function must be finite".into()))
            }
            SmoothTest::Sin { a } if !a.is_finite() => Err(Error::Invalid("sin frequency must be finite".into())),
            SmoothTest::Bump { alpha, z } if !(alpha > 0.0) || !(z >= 0.0) || !alpha.is_finite() || !z.is_finite() => {
                Err(Error::Invalid(format!("h_alpha needs alpha > 0 and z >= 0, got ({alpha}, {z})")))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            SmoothTest::Constant { value } => format!("constant({value})"),
            SmoothTest::Identity => "identity".into(),
            SmoothTest::Sin { a } => format!("sin({a}x)"),
            SmoothTest::ExpNeg => "exp(-x)".into(),
            SmoothTest::Reciprocal => "1/(1+x)".into(),
            SmoothTest::Bump { alpha, z } => format!("h_alpha(alpha={alpha},z={z})"),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SmoothTest::Constant { value } => value,
            SmoothTest::Identity => x,
            SmoothTest::Sin { a } => (a * x).sin(),
            SmoothTest::ExpNeg => (-x).exp(),
            SmoothTest::Reciprocal => 1.0 / (1.0 + x),
            SmoothTest::Bump { alpha, z } => {
                if x <= z {
                    1.0
                } else if x <= z + alpha / 2.0 {
                    1.0 - 2.0 * (x - z).powi(2) / (alpha * alpha)
                } else if x <= z + alpha {
                    2.0 * (x - z - alpha).powi(2) / (alpha * alpha)
                } else {
                    0.0
                }
            }
        }
    }

    /// `(‖h'‖, ‖h''‖)` over `[0, ∞)`.
    pub fn norms(&self) -> (f64, f64) {
        match *self {
            SmoothTest::Constant { .. } => (0.0, 0.0),
            SmoothTest::Identity => (1.0, 0.0),
            SmoothTest::Sin { a } => (a.abs(), a * a),
            SmoothTest::ExpNeg => (1.0, 1.0),
            SmoothTest::Reciprocal => (1.0, 2.0),
            SmoothTest::Bump { alpha, .. } => (2.0 / alpha, 4.0 / (alpha * alpha)),
        }
    }

    /// `E h(Y)` for `Y ~ χ²₍₁₎`, as `2∫_0^∞ h(z²) φ(z) dz`.
    pub fn chi2_1_expectation(&self) -> Result<f64> {
        self.validate()?;
        if let SmoothTest::Constant { value } = *self {
            return Ok(value);
        }
        let mut breaks = vec![0.0];
        if let SmoothTest::Bump { alpha, z } = *self {
            breaks.extend([z.sqrt(), (z + alpha / 2.0).sqrt(), (z + alpha).sqrt()]);
        }
        breaks.push(40.0);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let tol = Tolerance::new(1e-14, 1e-12).with_max_intervals(20_000);
        let mut total = 0.0;
        for w in breaks.windows(2) {
            total += integrate(|t| 2.0 * self.eval(t * t) * standard_normal_pdf(t), w[0], w[1], &tol)?;
        }
        Ok(total)
    }
}

/// `|mean h(samples) − E h(Y)|` with the standard error of the sample mean.
pub fn smooth_discrepancy(samples: &[f64], test: &SmoothTest) -> Result<DistanceEstimate> {
    if samples.len() < 2 {
        return Err(Error::Precondition("smooth discrepancy needs at least 2 samples".into()));
    }
    let target = test.chi2_1_expectation()?;
    let n = samples.len() as f64;
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &s) in samples.iter().enumerate() {
        let v = test.eval(s);
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (n - 1.0);
    Ok(DistanceEstimate {
        estimate: (mean - target).abs(),
        se: (var / n).sqrt(),
        samples: samples.len(),
        metric: format!("smooth:{}", test.name()),
    })
}
