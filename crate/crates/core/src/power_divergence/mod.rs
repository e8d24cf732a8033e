//! Pearson's statistic and the power divergence family for two-cell
//! multinomial data, with their chi-square approximation bounds.

mod bounds;

pub use bounds::{
    bound_pearson, bound_power_divergence, chain_constants, kolmogorov_bound_pd, w2_generic_bounds,
    w3h_prime_bound, AlphaPolicy, ChainConstants, StatMetric,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// `n` trials over two cells with probabilities `(p1, p2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultinomialModel {
    pub n: u64,
    pub p1: f64,
    pub p2: f64,
}

impl MultinomialModel {
    pub fn new(n: u64, p1: f64) -> Result<Self> {
        Self::with_probabilities(n, p1, 1.0 - p1)
    }

    pub fn with_probabilities(n: u64, p1: f64, p2: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("the number of trials must be at least 1".into()));
        }
        for p in [p1, p2] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Invalid(format!("cell probabilities must lie in (0, 1), got {p}")));
            }
        }
        if (p1 + p2 - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("p1 + p2 must equal 1, got {}", p1 + p2)));
        }
        Ok(Self { n, p1, p2 })
    }

    /// `n p1 p2`, the effective sample size in every bound.
    pub fn npp(&self) -> f64 {
        self.n as f64 * self.p1 * self.p2
    }

    /// `n min(p1, p2)`.
    pub fn n_p_min(&self) -> f64 {
        self.n as f64 * self.p1.min(self.p2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountVector {
    pub u1: u64,
    pub u2: u64,
}

impl CountVector {
    pub fn new(u1: u64, u2: u64) -> Self {
        Self { u1, u2 }
    }

    /// Counts with `u1` in the first cell and the rest in the second.
    pub fn from_first(u1: u64, model: &MultinomialModel) -> Result<Self> {
        if u1 > model.n {
            return Err(Error::Invalid(format!("count {u1} exceeds n = {}", model.n)));
        }
        Ok(Self { u1, u2: model.n - u1 })
    }

    fn check(&self, model: &MultinomialModel) -> Result<()> {
        if self.u1 + self.u2 != model.n {
            return Err(Error::Invalid(format!(
                "counts ({}, {}) do not sum to n = {}",
                self.u1, self.u2, model.n
            )));
        }
        Ok(())
    }

    fn cells(&self, model: &MultinomialModel) -> [(f64, f64); 2] {
        let n = model.n as f64;
        [(self.u1 as f64, n * model.p1), (self.u2 as f64, n * model.p2)]
    }
}

pub fn pearson_statistic(u: &CountVector, model: &MultinomialModel) -> Result<f64> {
    u.check(model)?;
    Ok(u.cells(model).iter().map(|(o, e)| (o - e) * (o - e) / e).sum())
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > -1.0) || !lambda.is_finite() {
        return Err(Error::Precondition(format!(
            "lambda = {lambda} is outside the family for lambda > -1"
        )));
    }
    Ok(())
}

/// One cell of `T_λ` written as `2e·φ_λ(o/e)` with the convex
/// `φ_λ(t) = (t^{λ+1} − 1 − (λ+1)(t − 1)) / (λ(λ+1))`. The added linear
/// terms cancel across cells, and each cell is nonnegative.
fn cell_divergence(o: f64, e: f64, lambda: f64) -> f64 {
    let l1 = lambda + 1.0;
    let v = if o == 0.0 {
        e / l1
    } else {
        let ln_t = (o / e).ln();
        if lambda == 0.0 {
            o * ln_t - (o - e)
        } else {
            e * ((l1 * ln_t).exp_m1() - l1 * ln_t.exp_m1()) / (lambda * l1)
        }
    };
    2.0 * v.max(0.0)
}

/// `T_λ = 2/(λ(λ+1)) Σ U_j[(U_j/(np_j))^λ − 1]`, with the log-likelihood ratio
/// statistic at `λ = 0` and Pearson's statistic at `λ = 1`.
pub fn power_divergence(u: &CountVector, model: &MultinomialModel, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if lambda == 1.0 {
        return pearson_statistic(u, model);
    }
    u.check(model)?;
    Ok(u
        .cells(model)
        .iter()
        .map(|&(o, e)| cell_divergence(o, e, lambda))
        .sum())
}

/// `W = (U₁ − np₁)/√(np₁p₂)` and the cell residuals `S_j = (U_j − np_j)/√(np_j)`,
/// so `S₁ = √p₂ W`, `S₂ = −√p₁ W` and `χ² = W²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtRepresentation {
    pub w: f64,
    pub s1: f64,
    pub s2: f64,
}

pub fn square_root_representation(u: &CountVector, model: &MultinomialModel) -> Result<SqrtRepresentation> {
    u.check(model)?;
    let n = model.n as f64;
    let w = (u.u1 as f64 - n * model.p1) / model.npp().sqrt();
    Ok(SqrtRepresentation {
        w,
        s1: model.p2.sqrt() * w,
        s2: -model.p1.sqrt() * w,
    })
}
