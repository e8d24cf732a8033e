use super::estimators::MIN_WASSERSTEIN_SAMPLES;
use super::{
    empirical_kolmogorov_chi2_1, empirical_wasserstein_chi2_1, sample_statistic, smooth_discrepancy,
    DistanceEstimate, EstimatorConfig, RngSeed, SmoothTest, StatisticKind,
};
use crate::error::{Error, Result};
use crate::limit_bounds::TestFunctionNorms;
use crate::power_divergence::{
    bound_pearson, bound_power_divergence, kolmogorov_bound_pd, AlphaPolicy, MultinomialModel, StatMetric,
};
use crate::report::BoundReport;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Multiplier on the standard error in the pass criterion.
pub const SE_MULTIPLIER: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditMetric {
    Wasserstein,
    Kolmogorov,
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditPoint {
    pub n: u64,
    pub p1: f64,
}

fn default_lambdas() -> Vec<f64> {
    vec![1.0]
}

fn default_resamples() -> usize {
    EstimatorConfig::default().bootstrap_resamples
}

fn default_strict() -> bool {
    true
}

/// One audit experiment: every grid point × λ × metric (× test function for
/// the smooth metric). `λ = 1` is Pearson's statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub points: Vec<AuditPoint>,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    pub metrics: Vec<AuditMetric>,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tests: Vec<SmoothTest>,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    /// Reject bounds that are not certified.
    #[serde(default = "default_strict")]
    pub strict: bool,
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() || self.metrics.is_empty() || self.lambdas.is_empty() {
            return Err(Error::Invalid("audit needs points, lambdas and metrics".into()));
        }
        for p in &self.points {
            MultinomialModel::new(p.n, p.p1)?;
        }
        for l in &self.lambdas {
            crate::power_divergence::check_lambda(*l)?;
        }
        if self.metrics.contains(&AuditMetric::Wasserstein) && self.samples < MIN_WASSERSTEIN_SAMPLES {
            return Err(Error::Precondition(format!(
                "the Wasserstein estimator needs at least {MIN_WASSERSTEIN_SAMPLES} samples, got {}",
                self.samples
            )));
        }
        if self.samples < 2 {
            return Err(Error::Precondition("audit needs at least 2 samples".into()));
        }
        if self.metrics.contains(&AuditMetric::Smooth) {
            if self.tests.is_empty() {
                return Err(Error::Invalid("the smooth metric needs at least one test function".into()));
            }
            for t in &self.tests {
                t.validate()?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub n: u64,
    pub p1: f64,
    pub lambda: f64,
    pub metric: String,
    pub test: String,
    pub bound: f64,
    pub certified: bool,
    pub estimate: f64,
    pub se: f64,
    /// `bound − (estimate + 5 se)`.
    pub margin: f64,
    pub pass: bool,
}

fn bound_for(metric: AuditMetric, model: &MultinomialModel, lambda: f64, test: Option<&SmoothTest>) -> Result<BoundReport> {
    let norms = test
        .map(|t| {
            let (a, b) = t.norms();
            TestFunctionNorms::pair(a, b)
        })
        .transpose()?;
    let pearson = lambda == 1.0;
    match metric {
        AuditMetric::Wasserstein if pearson => bound_pearson(StatMetric::Wasserstein, model, None),
        AuditMetric::Wasserstein => bound_power_divergence(StatMetric::Wasserstein, model, lambda, None),
        AuditMetric::Kolmogorov if pearson => bound_pearson(StatMetric::Kolmogorov, model, None),
        AuditMetric::Kolmogorov => kolmogorov_bound_pd(model, lambda, AlphaPolicy::Optimize),
        AuditMetric::Smooth if pearson => bound_pearson(StatMetric::Smooth, model, norms.as_ref()),
        AuditMetric::Smooth => bound_power_divergence(StatMetric::Smooth, model, lambda, norms.as_ref()),
    }
}

fn row(
    model: &MultinomialModel,
    lambda: f64,
    metric: &str,
    test: String,
    bound: &BoundReport,
    est: DistanceEstimate,
) -> AuditRow {
    let margin = bound.value - (est.estimate + SE_MULTIPLIER * est.se);
    AuditRow {
        n: model.n,
        p1: model.p1,
        lambda,
        metric: metric.into(),
        test,
        bound: bound.value,
        certified: bound.certified,
        estimate: est.estimate,
        se: est.se,
        margin,
        pass: margin >= 0.0,
    }
}

/// Run an audit; a row passes iff `estimate + 5 se ≤ bound`. Rows come out in
/// config order and are identical for a fixed seed.
pub fn audit(cfg: &AuditConfig) -> Result<Vec<AuditRow>> {
    cfg.validate()?;
    let seed = RngSeed::new(cfg.seed);
    let jobs: Vec<(usize, usize)> = (0..cfg.points.len())
        .flat_map(|i| (0..cfg.lambdas.len()).map(move |j| (i, j)))
        .collect();
    let blocks = jobs
        .par_iter()
        .map(|&(i, j)| -> Result<Vec<AuditRow>> {
            let point = cfg.points[i];
            let lambda = cfg.lambdas[j];
            let model = MultinomialModel::new(point.n, point.p1)?;
            let experiment = ((i as u64) << 20) | j as u64;
            let kind = if lambda == 1.0 {
                StatisticKind::Pearson { model }
            } else {
                StatisticKind::PowerDivergence { model, lambda }
            };
            // Bounds first, so strict mode fails before any sampling.
            let mut planned = Vec::new();
            for &metric in &cfg.metrics {
                let tests: Vec<Option<SmoothTest>> = if metric == AuditMetric::Smooth {
                    cfg.tests.iter().copied().map(Some).collect()
                } else {
                    vec![None]
                };
                for t in tests {
                    let bound = bound_for(metric, &model, lambda, t.as_ref())?;
                    if cfg.strict && !bound.certified {
                        return Err(Error::Precondition(format!(
                            "strict mode: the {} bound at n = {}, p1 = {}, lambda = {lambda} is not certified",
                            bound.metric.tag(),
                            point.n,
                            point.p1
                        )));
                    }
                    planned.push((metric, t, bound));
                }
            }
            let samples = sample_statistic(&kind, cfg.samples, seed, experiment)?;
            let est_cfg = EstimatorConfig {
                bootstrap_resamples: cfg.bootstrap_resamples,
                seed: seed.child(experiment, u64::MAX),
            };
            planned
                .into_iter()
                .map(|(metric, t, bound)| {
                    Ok(match (metric, t) {
                        (AuditMetric::Wasserstein, _) => {
                            row(&model, lambda, "d_W", String::new(), &bound, empirical_wasserstein_chi2_1(&samples, &est_cfg)?)
                        }
                        (AuditMetric::Kolmogorov, _) => {
                            row(&model, lambda, "d_K", String::new(), &bound, empirical_kolmogorov_chi2_1(&samples, &est_cfg)?)
                        }
                        (AuditMetric::Smooth, Some(t)) => {
                            row(&model, lambda, "smooth", t.name(), &bound, smooth_discrepancy(&samples, &t)?)
                        }
                        (AuditMetric::Smooth, None) => unreachable!("smooth rows always carry a test"),
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<AuditRow>>>>()?;
    Ok(blocks.concat())
}
