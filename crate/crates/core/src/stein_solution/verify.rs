use super::bounds::{bound_f, bound_psi, BoundVariant};
use super::function::{index_multisets, SmoothFunction};
use super::solver::{f_derivative, psi_derivative};
use super::{CovarianceSpec, DominatingPolynomial, QuadratureConfig};
use crate::error::{Error, Result};
use crate::limit_bounds::TestFunctionNorms;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative slack of the numerical class-membership check.
const CLASS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionTarget {
    /// `f_h^{(n)}`
    F { n: usize },
    /// `ψ_m^{(n)}`
    Psi { m: usize, n: usize },
}

/// Order `k` of the class `C_P^k` that the bound variant assumes `g` belongs to.
pub fn class_order(target: SolutionTarget, variant: BoundVariant) -> Result<usize> {
    let k = match (target, variant) {
        (SolutionTarget::F { n }, BoundVariant::I) => Some(n),
        (SolutionTarget::F { n }, BoundVariant::Ii) => n.checked_sub(1),
        (SolutionTarget::F { n }, BoundVariant::Iii) => n.checked_sub(2),
        (SolutionTarget::Psi { m, n }, BoundVariant::I) => Some(m + n),
        (SolutionTarget::Psi { m, n }, BoundVariant::Ii) => (m + n).checked_sub(2),
        (SolutionTarget::Psi { m, .. }, BoundVariant::Iii) => m.checked_sub(1),
    };
    k.ok_or_else(|| Error::Invalid(format!("{target:?} has no class order under variant {variant:?}")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceRow {
    pub target: SolutionTarget,
    pub variant: BoundVariant,
    pub max_ratio: f64,
    pub argmax: Vec<f64>,
    pub value_at_argmax: f64,
    pub bound_at_argmax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub rows: Vec<DominanceRow>,
    pub max_ratio: f64,
    pub argmax: Vec<f64>,
    pub slack: f64,
    pub passed: bool,
}

fn check_class(
    g: &SmoothFunction,
    poly: &DominatingPolynomial,
    order: usize,
    star: bool,
    w: &[f64],
) -> Result<()> {
    if order == 0 {
        return Ok(());
    }
    let p = poly.eval(w);
    let orders: Vec<usize> = if star { vec![order] } else { (1..=order).collect() };
    for j in orders {
        for idx in index_multisets(g.dim(), j) {
            let d = g.partial(&idx, w)?.abs();
            let lhs = if star { d } else { d.powf(order as f64 / j as f64) };
            if lhs > p * (1.0 + CLASS_SLACK) + 1e-300 {
                return Err(Error::ClassMembership {
                    point: w.to_vec(),
                    message: format!(
                        "|d^{j} g / dw{idx:?}|{} = {lhs} exceeds P(w) = {p} for class order {order}{}",
                        if star { String::new() } else { format!("^({order}/{j})") },
                        if star { " (star class)" } else { "" }
                    ),
                });
            }
        }
    }
    Ok(())
}

fn ratio(value: f64, bound: f64) -> f64 {
    if bound > 0.0 {
        value.abs() / bound
    } else if value.abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Evaluate `|f^{(n)}(w)| / bound` (and the `ψ_m` analogue) on a grid for each
/// requested `(target, variant, P)` triple, after checking numerically that
/// `g` lies in the class the variant requires.
pub fn verify_derivative_bounds(
    h: &SmoothFunction,
    g: &SmoothFunction,
    sigma: &CovarianceSpec,
    checks: &[(SolutionTarget, BoundVariant, DominatingPolynomial)],
    grid: &[Vec<f64>],
    cfg: &QuadratureConfig,
) -> Result<DominanceReport> {
    cfg.validate()?;
    let norms = TestFunctionNorms::new(
        h.sup_norms()
            .ok_or_else(|| Error::Invalid(format!("{} has no declared sup norms", h.name())))?
            .to_vec(),
    )?;
    let star = h.is_identity();
    let mut rows = Vec::with_capacity(checks.len());
    for (target, variant, poly) in checks {
        let order = class_order(*target, *variant)?;
        for w in grid {
            check_class(g, poly, order, star, w)?;
        }
        let per_point: Vec<Result<(f64, f64, f64)>> = grid
            .par_iter()
            .map(|w| {
                let (value, bound) = match *target {
                    SolutionTarget::F { n } => {
                        let bound = bound_f(*variant, poly, sigma, &norms, n, w)?.value;
                        let mut worst = 0.0f64;
                        for idx in index_multisets(g.dim(), n) {
                            let v = f_derivative(h, g, sigma, w, &idx, cfg)?;
                            if v.abs() > worst.abs() {
                                worst = v;
                            }
                        }
                        (worst, bound)
                    }
                    SolutionTarget::Psi { m, n } => {
                        if g.dim() != 1 {
                            return Err(Error::Unsupported("psi derivatives are one-dimensional".into()));
                        }
                        let bound = bound_psi(*variant, poly, sigma, &norms, m, n, w)?.value;
                        (psi_derivative(h, g, m, w[0], n, cfg)?, bound)
                    }
                };
                Ok((ratio(value, bound), value, bound))
            })
            .collect();
        let mut row = DominanceRow {
            target: *target,
            variant: *variant,
            max_ratio: 0.0,
            argmax: grid.first().cloned().unwrap_or_default(),
            value_at_argmax: 0.0,
            bound_at_argmax: 0.0,
        };
        for (w, r) in grid.iter().zip(per_point) {
            let (q, v, b) = r?;
            if q > row.max_ratio {
                row.max_ratio = q;
                row.argmax = w.clone();
                row.value_at_argmax = v;
                row.bound_at_argmax = b;
            }
        }
        rows.push(row);
    }
    let slack = 100.0 * cfg.tolerance;
    let worst = rows
        .iter()
        .max_by(|a, b| a.max_ratio.total_cmp(&b.max_ratio));
    let (max_ratio, argmax) = worst.map_or((0.0, Vec::new()), |r| (r.max_ratio, r.argmax.clone()));
    Ok(DominanceReport {
        passed: max_ratio <= 1.0 + slack,
        rows,
        max_ratio,
        argmax,
        slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic() -> SmoothFunction {
        SmoothFunction::univariate(
            "quadratic",
            |x| x * x,
            |k, x| match k {
                1 => 2.0 * x,
                2 => 2.0,
                _ => 0.0,
            },
            32,
        )
    }

    #[test]
    fn quadratic_identity_passes() {
        let grid: Vec<Vec<f64>> = (-4..=4).map(|i| vec![i as f64]).collect();
        let p = DominatingPolynomial::univariate(2.0, 4.0, 2.0).unwrap();
        let rep = verify_derivative_bounds(
            &SmoothFunction::identity(),
            &quadratic(),
            &CovarianceSpec::identity(1),
            &[(SolutionTarget::F { n: 2 }, BoundVariant::I, p)],
            &grid,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!(rep.passed);
        assert!(rep.max_ratio <= 1.0);
    }

    #[test]
    fn class_violation_names_the_point() {
        let grid = vec![vec![0.0], vec![3.0]];
        let p = DominatingPolynomial::univariate(2.0, 0.0, 0.0).unwrap();
        let err = verify_derivative_bounds(
            &SmoothFunction::identity(),
            &quadratic(),
            &CovarianceSpec::identity(1),
            &[(SolutionTarget::F { n: 1 }, BoundVariant::I, p)],
            &grid,
            &QuadratureConfig::default(),
        )
        .unwrap_err();
        match err {
            Error::ClassMembership { point, .. } => assert_eq!(point, vec![3.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn class_orders() {
        assert_eq!(class_order(SolutionTarget::F { n: 3 }, BoundVariant::Iii).unwrap(), 1);
        assert_eq!(class_order(SolutionTarget::Psi { m: 2, n: 3 }, BoundVariant::Iii).unwrap(), 1);
        assert_eq!(class_order(SolutionTarget::Psi { m: 1, n: 2 }, BoundVariant::Ii).unwrap(), 1);
        assert!(class_order(SolutionTarget::F { n: 1 }, BoundVariant::Iii).is_err());
    }
}
