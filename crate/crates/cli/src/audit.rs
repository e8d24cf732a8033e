use crate::config::load;
use crate::output::Report;
use crate::Globals;
use anyhow::Result;
use clap::Args;
use std::path::PathBuf;
use stein_bounds::monte_carlo::{audit, AuditConfig};

const COLUMNS: &[&str] = &[
    "n", "p1", "lambda", "metric", "test", "bound", "certified", "estimate", "se", "margin", "pass",
];

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Audit config (JSON).
    #[arg(long)]
    config: PathBuf,
}

pub fn run(args: AuditArgs, globals: &Globals) -> Result<Report> {
    let mut cfg: AuditConfig = load(&args.config)?;
    if let Some(seed) = globals.seed {
        cfg.seed = seed;
    }
    let rows = audit(&cfg)?;
    let mut report = Report::new("audit", COLUMNS);
    report.seed = Some(cfg.seed);
    report.say(format!(
        "{:>7} {:>6} {:>8} {:<7} {:<16} {:>12} {:>12} {:>10}  result",
        "n", "p1", "lambda", "metric", "test", "bound", "estimate", "se"
    ));
    let mut failed = 0usize;
    for r in rows {
        report.pass &= r.pass;
        failed += usize::from(!r.pass);
        report.say(format!(
            "{:>7} {:>6} {:>8.4} {:<7} {:<16} {:>12.5e} {:>12.5e} {:>10.2e}  {}",
            r.n,
            r.p1,
            r.lambda,
            r.metric,
            r.test,
            r.bound,
            r.estimate,
            r.se,
            if r.pass { "pass" } else { "FAIL" }
        ));
        report.push(vec![
            r.n.into(),
            r.p1.into(),
            r.lambda.into(),
            r.metric.into(),
            r.test.into(),
            r.bound.into(),
            r.certified.into(),
            r.estimate.into(),
            r.se.into(),
            r.margin.into(),
            r.pass.into(),
        ]);
    }
    report.say(format!("{} rows, {failed} failed (seed {})", report.rows.len(), cfg.seed));
    Ok(report)
}
