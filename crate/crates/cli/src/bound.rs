use crate::config::{load, parse_list};
use crate::output::Report;
use crate::Globals;
use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;
use std::path::PathBuf;
use stein_bounds::limit_bounds::{cor33_bound, thm32_bound, EwPolicy, MomentFamily, TheoremPart};
use stein_bounds::power_divergence::{bound_pearson, bound_power_divergence, kolmogorov_bound_pd};
use stein_bounds::{
    make_moment_oracle, AlphaPolicy, BoundReport, DominatingPolynomial, MultinomialModel, StatMetric,
    SumComponent, SumSpecification, TestFunctionNorms,
};

const COLUMNS: &[&str] = &["kind", "n", "p1", "lambda", "metric", "value", "certified", "cap_binding", "provenance"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Pearson's chi-square statistic.
    Pearson,
    /// The power divergence statistic T_lambda.
    Pd,
    /// A general sum bound from a JSON config.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Wasserstein,
    Smooth,
    Kolmogorov,
}

impl From<MetricArg> for StatMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Wasserstein => StatMetric::Wasserstein,
            MetricArg::Smooth => StatMetric::Smooth,
            MetricArg::Kolmogorov => StatMetric::Kolmogorov,
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    /// Derivative norms `|h'|,|h''|` for the smooth metric.
    #[arg(long)]
    norms: Option<String>,
    /// Fixed smoothing width for the Kolmogorov bound of `pd` (default: optimized).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Config for `pearson` and `pd`; command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatConfig {
    n: Option<u64>,
    p1: Option<f64>,
    lambda: Option<f64>,
    metric: Option<StatMetric>,
    norms: Option<Vec<f64>>,
    alpha: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentConfig {
    n: u64,
    moments: MomentFamily,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyConfig {
    a: f64,
    b: f64,
    exponents: Vec<f64>,
}

/// The simplified bound with a caller-supplied constant.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorollaryConfig {
    r_star: f64,
    c: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneralConfig {
    part: TheoremPart,
    components: Vec<ComponentConfig>,
    poly: Option<PolyConfig>,
    norms: Vec<f64>,
    p: u32,
    #[serde(default = "holder")]
    ew_policy: EwPolicy,
    #[serde(default)]
    g_even: bool,
    corollary: Option<CorollaryConfig>,
}

fn holder() -> EwPolicy {
    EwPolicy::HolderCap
}

fn push(report: &mut Report, kind: &str, n: Option<u64>, p1: Option<f64>, lambda: Option<f64>, b: &BoundReport) -> Result<()> {
    report.push(vec![
        kind.into(),
        n.into(),
        p1.into(),
        lambda.into(),
        b.metric.tag().into(),
        b.value.into(),
        b.certified.into(),
        b.cap_binding.into(),
        b.provenance.as_str().into(),
    ]);
    report.say(format!(
        "{kind} {}: bound {} ({}{})",
        b.metric.tag(),
        b.value,
        if b.certified { "certified" } else { "not certified" },
        if b.cap_binding { ", cap binding" } else { "" }
    ));
    for t in &b.terms {
        report.say(format!("  term  {:<60} {}", t.label, t.value));
    }
    for a in b.assumptions.iter().filter(|a| a.status != stein_bounds::report::AssumptionStatus::Checked) {
        report.say(format!("  assumption {:?}: {}", a.status, a.clause));
    }
    for note in &b.notes {
        report.say(format!("  note  {note}"));
    }
    report.details = Some(serde_json::to_value(b)?);
    Ok(())
}

pub fn run(args: BoundArgs, globals: &Globals) -> Result<Report> {
    let mut report = Report::new("bound", COLUMNS);
    if args.kind == Kind::General {
        let path = args.config.as_ref().context("`bound general` needs --config FILE")?;
        if args.n.is_some() || args.p1.is_some() || args.lambda.is_some() || args.metric.is_some() || args.norms.is_some() {
            bail!("`bound general` takes its inputs from --config only");
        }
        let cfg: GeneralConfig = load(path)?;
        let b = general(cfg, globals)?;
        push(&mut report, "general", None, None, None, &b)?;
        return Ok(report);
    }
    let file: StatConfig = match &args.config {
        Some(p) => load(p)?,
        None => StatConfig::default(),
    };
    let n = args.n.or(file.n).context("--n is required")?;
    let p1 = args.p1.or(file.p1).context("--p1 is required")?;
    let metric: StatMetric = args.metric.map(Into::into).or(file.metric).unwrap_or(StatMetric::Wasserstein);
    let norms = match (&args.norms, file.norms) {
        (Some(s), _) => Some(parse_list::<f64>(s)?),
        (None, v) => v,
    };
    let norms = norms.map(TestFunctionNorms::new).transpose()?;
    let model = MultinomialModel::new(n, p1)?;
    let alpha = args.alpha.or(file.alpha);
    let (kind, lambda, b) = match args.kind {
        Kind::Pearson => {
            if args.lambda.or(file.lambda).is_some_and(|l| l != 1.0) {
                bail!("Pearson's statistic is lambda = 1; use `bound pd` for other lambda");
            }
            if alpha.is_some() {
                bail!("--alpha applies to `bound pd --metric kolmogorov` only");
            }
            ("pearson", None, bound_pearson(metric, &model, norms.as_ref())?)
        }
        Kind::Pd => {
            let lambda = args.lambda.or(file.lambda).context("`bound pd` needs --lambda")?;
            let b = match (metric, alpha) {
                (StatMetric::Kolmogorov, Some(alpha)) => kolmogorov_bound_pd(&model, lambda, AlphaPolicy::Fixed { alpha })?,
                (_, Some(_)) => bail!("--alpha applies to the Kolmogorov metric only"),
                _ => bound_power_divergence(metric, &model, lambda, norms.as_ref())?,
            };
            ("pd", Some(lambda), b)
        }
        Kind::General => unreachable!("handled above"),
    };
    push(&mut report, kind, Some(n), Some(p1), lambda, &b)?;
    Ok(report)
}

fn general(cfg: GeneralConfig, globals: &Globals) -> Result<BoundReport> {
    let components = cfg
        .components
        .into_iter()
        .map(|c| Ok(SumComponent { n: c.n, oracle: make_moment_oracle(c.moments)? }))
        .collect::<Result<Vec<_>>>()?;
    let spec = SumSpecification::new(components)?;
    let norms = TestFunctionNorms::new(cfg.norms)?;
    let policy = match (cfg.ew_policy, globals.seed) {
        (EwPolicy::MonteCarloCi { samples, .. }, Some(seed)) => EwPolicy::MonteCarloCi { samples, seed },
        (p, _) => p,
    };
    match (cfg.corollary, cfg.poly) {
        (Some(c), None) => Ok(cor33_bound(cfg.part, &spec, c.r_star, &norms, cfg.p, c.c)?),
        (None, Some(poly)) => {
            let poly = DominatingPolynomial::new(poly.a, poly.b, poly.exponents)?;
            Ok(thm32_bound(cfg.part, &spec, &poly, &norms, cfg.p, policy, cfg.g_even)?)
        }
        (Some(_), Some(_)) => bail!("give either `poly` or `corollary`, not both"),
        (None, None) => bail!("the config needs `poly` (or `corollary` for the simplified bound)"),
    }
}
