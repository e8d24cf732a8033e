use crate::config::{grid_points, load, parse_grid, parse_list, parse_pairs};
use crate::output::{Cell, Report};
use crate::Globals;
use anyhow::{bail, Result};
use clap::Args;
use serde::Deserialize;
use std::path::PathBuf;
use stein_bounds::battery::{class_polynomial, lookup_g, lookup_h};
use stein_bounds::stein_solution::{
    bound_f, bound_psi, class_order, stein_residual, verify_derivative_bounds, BoundVariant, SolutionTarget,
};
use stein_bounds::{CovarianceSpec, DominatingPolynomial, Error, QuadratureConfig, TestFunctionNorms};

const COLUMNS: &[&str] = &["check", "target", "variant", "value", "limit", "argmax", "pass"];

/// Slack on a bound ratio before it counts as a violation.
const RATIO_SLACK: f64 = 1e-6;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Registered g (linear, quadratic, cubic, quartic, sextic, quadratic2d).
    #[arg(long)]
    g: Option<String>,
    /// Registered h (identity, sin, cos, exp_neg).
    #[arg(long)]
    h: Option<String>,
    /// Derivative orders of f to check, e.g. `1,2,3`.
    #[arg(long)]
    orders: Option<String>,
    /// Derivatives of psi_m to check as `m:n` pairs, e.g. `1:1,1:2`.
    #[arg(long)]
    psi: Option<String>,
    /// Bound variants, from `i,ii,iii`.
    #[arg(long)]
    variants: Option<String>,
    /// Grid per coordinate as `lo:hi:step`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridConfig {
    lo: f64,
    hi: f64,
    step: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyConfig {
    g: Option<String>,
    h: Option<String>,
    orders: Option<Vec<usize>>,
    psi: Option<Vec<(usize, usize)>>,
    variants: Option<Vec<BoundVariant>>,
    grid: Option<GridConfig>,
    quadrature: Option<QuadratureConfig>,
    /// Multiplies every bound before the comparison; below 1 it claims
    /// tighter bounds than were proved.
    bound_scale: Option<f64>,
}

fn parse_variant(s: &str) -> Result<BoundVariant> {
    Ok(match s {
        "i" => BoundVariant::I,
        "ii" => BoundVariant::Ii,
        "iii" => BoundVariant::Iii,
        _ => bail!("unknown bound variant '{s}'; expected i, ii or iii"),
    })
}

fn target_label(t: SolutionTarget) -> String {
    match t {
        SolutionTarget::F { n } => format!("f^({n})"),
        SolutionTarget::Psi { m, n } => format!("psi_{m}^({n})"),
    }
}

fn point_label(w: &[f64]) -> String {
    let parts: Vec<String> = w.iter().map(|v| v.to_string()).collect();
    parts.join(";")
}

pub fn run(args: VerifyArgs, _globals: &Globals) -> Result<Report> {
    let file: VerifyConfig = match &args.config {
        Some(p) => load(p)?,
        None => VerifyConfig::default(),
    };
    let Some(g_name) = args.g.or(file.g) else { bail!("--g is required") };
    let Some(h_name) = args.h.or(file.h) else { bail!("--h is required") };
    let g = lookup_g(&g_name)?;
    let h = lookup_h(&h_name)?;
    let cfg = file.quadrature.unwrap_or_default();
    cfg.validate()?;
    let scale = file.bound_scale.unwrap_or(1.0);
    if !(scale > 0.0) || !scale.is_finite() {
        bail!("bound_scale must be positive, got {scale}");
    }
    let dim = g.dim();
    let registered = class_polynomial(&g_name, 1, false).is_ok();
    let orders = match (&args.orders, file.orders) {
        (Some(s), _) => parse_list::<usize>(s)?,
        (None, Some(v)) => v,
        (None, None) if registered => vec![1, 2, 3],
        (None, None) => Vec::new(),
    };
    let psi = match (&args.psi, file.psi) {
        (Some(s), _) => parse_pairs(s)?,
        (None, v) => v.unwrap_or_default(),
    };
    let variants = match (&args.variants, file.variants) {
        (Some(s), _) => s.split(',').map(|v| parse_variant(v.trim())).collect::<Result<Vec<_>>>()?,
        (None, Some(v)) => v,
        (None, None) => vec![BoundVariant::I, BoundVariant::Ii, BoundVariant::Iii],
    };
    let (lo, hi, step) = match (&args.grid, file.grid) {
        (Some(s), _) => parse_grid(s)?,
        (None, Some(gc)) => (gc.lo, gc.hi, gc.step),
        (None, None) if dim == 1 => (-10.0, 10.0, 0.5),
        (None, None) => (-3.0, 3.0, 1.0),
    };
    let axis = grid_points(lo, hi, step)?;
    let grid: Vec<Vec<f64>> = match dim {
        1 => axis.iter().map(|&w| vec![w]).collect(),
        2 => axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect(),
        _ => bail!("verify-solution supports d <= 2, got d = {dim}"),
    };
    let sigma = CovarianceSpec::identity(dim);
    let mut report = Report::new("verify-solution", COLUMNS);

    let limit = 10.0 * cfg.tolerance;
    match stein_residual(&h, &g, &sigma, &grid, &cfg) {
        Ok(r) => {
            let pass = r <= limit;
            report.pass &= pass;
            report.push(vec!["residual".into(), Cell::Empty, Cell::Empty, r.into(), limit.into(), Cell::Empty, pass.into()]);
            report.say(format!(
                "({g_name}, {h_name}) residual {r:.3e} over {} points (limit {limit:.1e}): {}",
                grid.len(),
                if pass { "pass" } else { "FAIL" }
            ));
        }
        Err(e @ Error::Quadrature { .. }) => {
            report.pass = false;
            report.push(vec!["residual".into(), Cell::Empty, Cell::Empty, Cell::Empty, limit.into(), Cell::Empty, false.into()]);
            report.say(format!("({g_name}, {h_name}) residual: {e}"));
        }
        Err(e) => return Err(e.into()),
    }

    let norms = TestFunctionNorms::new(h.sup_norms().unwrap_or(&[]).to_vec())?;
    let star = h.is_identity();
    let mut targets: Vec<SolutionTarget> = orders.iter().map(|&n| SolutionTarget::F { n }).collect();
    targets.extend(psi.iter().map(|&(m, n)| SolutionTarget::Psi { m, n }));
    let mut checks: Vec<(SolutionTarget, BoundVariant, DominatingPolynomial)> = Vec::new();
    let origin = vec![0.0; dim];
    for &target in &targets {
        for &variant in &variants {
            let Ok(k) = class_order(target, variant) else { continue };
            let poly = class_polynomial(&g_name, k as u32, star)?;
            let applicable = match target {
                SolutionTarget::F { n } => bound_f(variant, &poly, &sigma, &norms, n, &origin).map(|_| ()),
                SolutionTarget::Psi { m, n } => bound_psi(variant, &poly, &sigma, &norms, m, n, &origin).map(|_| ()),
            };
            match applicable {
                Ok(()) => checks.push((target, variant, poly)),
                Err(e) => report.say(format!("  {} variant {}: not applicable ({e})", target_label(target), variant.label())),
            }
        }
    }
    if checks.is_empty() {
        if !targets.is_empty() {
            bail!("none of the requested (order, variant) pairs has an applicable bound");
        }
        return Ok(report);
    }
    let dominance = match verify_derivative_bounds(&h, &g, &sigma, &checks, &grid, &cfg) {
        Ok(d) => d,
        Err(e @ (Error::Quadrature { .. } | Error::ClassMembership { .. })) => {
            report.pass = false;
            report.say(format!("derivative bounds: {e}"));
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    for row in &dominance.rows {
        let ratio = row.max_ratio / scale;
        let pass = ratio <= 1.0 + RATIO_SLACK;
        report.pass &= pass;
        report.push(vec![
            "bound_ratio".into(),
            target_label(row.target).into(),
            row.variant.label().into(),
            ratio.into(),
            (1.0 + RATIO_SLACK).into(),
            point_label(&row.argmax).into(),
            pass.into(),
        ]);
        report.say(format!(
            "  {:<12} variant {:<4} max ratio {ratio:.6} at w = {}{}",
            target_label(row.target),
            row.variant.label(),
            point_label(&row.argmax),
            if pass { "" } else { "  FAIL" }
        ));
    }
    Ok(report)
}
