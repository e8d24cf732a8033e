//! Seeded simulation of the statistics and empirical distances to `χ²₍₁₎`.
//!
//! Sampling is split into fixed-size chunks. Chunk `c` of experiment `e` draws
//! from a ChaCha8 stream seeded with `child(e, c)`, so a batch depends only on
//! the master seed and never on the number of worker threads.

mod audit;
mod estimators;

pub use audit::{audit, AuditConfig, AuditMetric, AuditPoint, AuditRow};
pub use estimators::{
    empirical_kolmogorov_chi2_1, empirical_wasserstein_chi2_1, smooth_discrepancy, DistanceEstimate,
    EstimatorConfig, SmoothTest,
};

use crate::error::{Error, Result};
use crate::limit_bounds::{MomentFamily, MomentOracle, SumSpecification};
use crate::power_divergence::{power_divergence, CountVector, MultinomialModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per chunk; fixed so that results do not depend on scheduling.
pub const CHUNK_SIZE: usize = 65_536;

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed {
    pub master: u64,
}

impl RngSeed {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    /// SplitMix64 avalanche of `(master, experiment, chunk)`. The last step is a
    /// bijection in `chunk`, so distinct chunks get distinct seeds.
    pub fn child(&self, experiment: u64, chunk: u64) -> u64 {
        let base = splitmix64(self.master ^ splitmix64(experiment));
        splitmix64(base ^ chunk)
    }

    pub fn rng(&self, experiment: u64, chunk: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.child(experiment, chunk))
    }
}

/// Fill `count` samples chunk by chunk in parallel, concatenated in chunk order.
pub(crate) fn sample_chunked<F>(count: usize, seed: RngSeed, experiment: u64, draw: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = count.div_ceil(CHUNK_SIZE);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK_SIZE.min(count - c * CHUNK_SIZE);
            let mut rng = seed.rng(experiment, c as u64);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.concat()
}

/// `Bin(n, p)` by inversion of a tabulated CDF over `mean ± 40 sd`; the mass
/// outside the window is below `e^{-800}`.
#[derive(Debug, Clone)]
pub struct BinomialSampler {
    offset: u64,
    cdf: Vec<f64>,
}

impl BinomialSampler {
    pub fn new(n: u64, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Invalid(format!("binomial p must lie in (0, 1), got {p}")));
        }
        let nf = n as f64;
        let sd = (nf * p * (1.0 - p)).sqrt();
        let lo = (nf * p - 40.0 * sd - 1.0).floor().max(0.0) as u64;
        let hi = ((nf * p + 40.0 * sd + 1.0).ceil() as u64).min(n);
        if hi - lo > 50_000_000 {
            return Err(Error::Unsupported(format!("binomial table for n = {n} is too large")));
        }
        let ln_n = libm::lgamma(nf + 1.0);
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        let ln_pmf: Vec<f64> = (lo..=hi)
            .map(|k| {
                let kf = k as f64;
                ln_n - libm::lgamma(kf + 1.0) - libm::lgamma(nf - kf + 1.0) + kf * lp + (nf - kf) * lq
            })
            .collect();
        let peak = ln_pmf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = ln_pmf
            .iter()
            .map(|l| {
                acc += (l - peak).exp();
                acc
            })
            .collect();
        let total = acc;
        for c in &mut cdf {
            *c /= total;
        }
        Ok(Self { offset: lo, cdf })
    }

    /// Support of the table as `(first, last)`.
    pub fn support(&self) -> (u64, u64) {
        (self.offset, self.offset + self.cdf.len() as u64 - 1)
    }

    /// Index into the table for a uniform draw.
    fn index(&self, u: f64) -> usize {
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        self.offset + self.index(rng.random::<f64>()) as u64
    }
}

/// Which statistic to simulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StatisticKind {
    Pearson { model: MultinomialModel },
    PowerDivergence { model: MultinomialModel, lambda: f64 },
    /// `W = n^{-1/2} Σ X_i` for a one-component sum.
    WSum { spec: SumSpecification },
}

/// `count` i.i.d. draws of the statistic.
pub fn sample_statistic(kind: &StatisticKind, count: usize, seed: RngSeed, experiment: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    let (model, lambda) = match kind {
        StatisticKind::Pearson { model } => (model, 1.0),
        StatisticKind::PowerDivergence { model, lambda } => (model, *lambda),
        StatisticKind::WSum { spec } => {
            if spec.dim() != 1 {
                return Err(Error::Unsupported("only one-component sums can be sampled".into()));
            }
            let c = &spec.components[0];
            return sample_w_sum(&c.oracle, c.n, count, seed, experiment);
        }
    };
    let sampler = BinomialSampler::new(model.n, model.p1)?;
    let (lo, hi) = sampler.support();
    let table = (lo..=hi)
        .map(|k| power_divergence(&CountVector::from_first(k, model)?, model, lambda))
        .collect::<Result<Vec<f64>>>()?;
    Ok(sample_chunked(count, seed, experiment, |rng| {
        table[sampler.index(rng.random::<f64>())]
    }))
}

/// `count` draws of `W = n^{-1/2} Σ X_i` with summands from `oracle`.
pub fn sample_w_sum(oracle: &MomentOracle, n: u64, count: usize, seed: RngSeed, experiment: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    let nf = n as f64;
    match oracle.family() {
        MomentFamily::BernoulliStandardized { p1 } => {
            let p1 = *p1;
            let s = BinomialSampler::new(n, p1)?;
            let scale = (nf * p1 * (1.0 - p1)).sqrt();
            Ok(sample_chunked(count, seed, experiment, |rng| {
                (s.sample(rng) as f64 - nf * p1) / scale
            }))
        }
        MomentFamily::Rademacher => {
            let s = BinomialSampler::new(n, 0.5)?;
            Ok(sample_chunked(count, seed, experiment, |rng| {
                (2.0 * s.sample(rng) as f64 - nf) / nf.sqrt()
            }))
        }
        MomentFamily::UniformStandardized => {
            if n > 1_000_000 {
                return Err(Error::Unsupported(format!(
                    "uniform sums are drawn term by term; n = {n} is too large"
                )));
            }
            let a = 3f64.sqrt();
            Ok(sample_chunked(count, seed, experiment, |rng| {
                (0..n).map(|_| rng.random_range(-a..a)).sum::<f64>() / nf.sqrt()
            }))
        }
        MomentFamily::Table(_) => Err(Error::Unsupported(
            "a moment table has no sampler".into(),
        )),
    }
}

/// `count` exact `χ²₍₁₎` draws, for estimator calibration.
pub fn sample_chi2_1(count: usize, seed: RngSeed, experiment: u64) -> Vec<f64> {
    sample_chunked(count, seed, experiment, |rng| {
        let z: f64 = rng.sample(rand_distr::StandardNormal);
        z * z
    })
}
