//! Numerical solutions of the multivariate normal Stein equation
//! `∇ᵀΣ∇f − wᵀ∇f = h(g(w)) − E h(g(Σ^{1/2}Z))`, their derivatives, the
//! second-level solutions `ψ_m`, and the closed-form derivative bounds.

mod bounds;
mod function;
mod solver;
mod verify;

pub use bounds::{bivariate_abs_moment, bound_f, bound_psi, BoundVariant};
pub use function::{composed_partial, index_multisets, Parity, SmoothFunction};
pub use solver::{
    f_derivative, growth_ratio, psi_derivative, psi_residual, solve_f, stein_residual,
    PsiResidual,
};
pub use verify::{
    class_order, verify_derivative_bounds, DominanceReport, DominanceRow, SolutionTarget,
};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// `P(w) = A + B Σ_i |w_i|^{r_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominatingPolynomial {
    pub a: f64,
    pub b: f64,
    pub exponents: Vec<f64>,
}

impl DominatingPolynomial {
    pub fn new(a: f64, b: f64, exponents: Vec<f64>) -> Result<Self> {
        if !(a >= 0.0) || !(b >= 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Invalid(format!(
                "dominating polynomial needs A, B >= 0, got A = {a}, B = {b}"
            )));
        }
        if exponents.is_empty() {
            return Err(Error::Invalid("dominating polynomial needs at least one exponent".into()));
        }
        if let Some(r) = exponents.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
            return Err(Error::Invalid(format!("exponents must be nonnegative, got {r}")));
        }
        Ok(Self { a, b, exponents })
    }

    /// One-dimensional `A + B|w|^r`.
    pub fn univariate(a: f64, b: f64, r: f64) -> Result<Self> {
        Self::new(a, b, vec![r])
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn eval(&self, w: &[f64]) -> f64 {
        self.a
            + self.b
                * w.iter()
                    .zip(&self.exponents)
                    .map(|(x, r)| abs_pow(*x, *r))
                    .sum::<f64>()
    }
}

/// `|x|^r` with `0^0 = 1`.
pub(crate) fn abs_pow(x: f64, r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        x.abs().powf(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum CovarianceKind {
    Identity,
    Diagonal(Vec<f64>),
    General(Vec<Vec<f64>>),
}

/// Covariance of the limiting normal vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    kind: CovarianceKind,
    dim: usize,
}

impl CovarianceSpec {
    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            kind: CovarianceKind::Identity,
            dim,
        }
    }

    pub fn diagonal(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid("diagonal covariance needs at least one entry".into()));
        }
        if let Some(v) = entries.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Invalid(format!("diagonal entries must be >= 0, got {v}")));
        }
        let dim = entries.len();
        Ok(Self {
            kind: CovarianceKind::Diagonal(entries),
            dim,
        })
    }

    pub fn general(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid("covariance matrix must be square and nonempty".into()));
        }
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::Invalid(format!(
                        "covariance matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let spec = Self {
            kind: CovarianceKind::General(rows),
            dim,
        };
        let min_eig = spec.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-12 {
            return Err(Error::Invalid(format!(
                "covariance matrix has negative eigenvalue {min_eig}"
            )));
        }
        Ok(spec)
    }

    pub fn kind(&self) -> &CovarianceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_identity(&self) -> bool {
        match &self.kind {
            CovarianceKind::Identity => true,
            CovarianceKind::Diagonal(d) => d.iter().all(|v| *v == 1.0),
            CovarianceKind::General(_) => self.matrix() == DMatrix::identity(self.dim, self.dim),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        match &self.kind {
            CovarianceKind::Identity | CovarianceKind::Diagonal(_) => true,
            CovarianceKind::General(rows) => (0..self.dim)
                .all(|i| (0..self.dim).all(|j| i == j || rows[i][j] == 0.0)),
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        match &self.kind {
            CovarianceKind::Identity => DMatrix::identity(self.dim, self.dim),
            CovarianceKind::Diagonal(d) => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone())),
            CovarianceKind::General(rows) => {
                DMatrix::from_fn(self.dim, self.dim, |i, j| rows[i][j])
            }
        }
    }

    pub fn sigma_ii(&self, i: usize) -> f64 {
        match &self.kind {
            CovarianceKind::Identity => 1.0,
            CovarianceKind::Diagonal(d) => d[i],
            CovarianceKind::General(rows) => rows[i][i],
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.matrix()).eigenvalues.iter().copied().collect()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues().into_iter().all(|v| v > 0.0)
    }

    /// Symmetric square root `Σ^{1/2}`.
    pub fn sqrt(&self) -> DMatrix<f64> {
        self.sym_power(0.5)
    }

    /// Symmetric `Σ^{-1/2}`; requires positive definiteness.
    pub fn inv_sqrt(&self) -> Result<DMatrix<f64>> {
        self.require_positive_definite("inverse square root")?;
        Ok(self.sym_power(-0.5))
    }

    /// `Σ^{-1}`; requires positive definiteness.
    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.require_positive_definite("inverse")?;
        Ok(self.sym_power(-1.0))
    }

    pub(crate) fn require_positive_definite(&self, what: &str) -> Result<()> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "{what} requires a positive definite covariance matrix"
            )))
        }
    }

    fn sym_power(&self, power: f64) -> DMatrix<f64> {
        if let CovarianceKind::Identity = self.kind {
            return DMatrix::identity(self.dim, self.dim);
        }
        if self.is_diagonal() {
            let d = (0..self.dim).map(|i| {
                let v = self.sigma_ii(i).max(0.0);
                if v == 0.0 && power <= 0.0 {
                    f64::INFINITY
                } else {
                    v.powf(power)
                }
            });
            return DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(self.dim, d));
        }
        let eig = SymmetricEigen::new(self.matrix());
        let vals = eig.eigenvalues.map(|v| v.max(0.0).powf(power));
        &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
    }
}

/// Rule used for the inner Gaussian expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerRule {
    /// Adaptive quadrature in one dimension, tensor Gauss–Hermite otherwise.
    Auto,
    /// Tensor Gauss–Hermite, cross-checked against a rule with a quarter
    /// more nodes; disagreement beyond the tolerance is a quadrature error.
    GaussHermite,
    /// Adaptive Gauss–Kronrod, iterated over coordinates when `d > 1`. Robust
    /// for oscillatory `h∘g` but expensive beyond one dimension.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub gauss_hermite_nodes: usize,
    /// Subinterval budget of the adaptive outer integrals.
    pub t_panels: usize,
    pub tolerance: f64,
    pub inner: InnerRule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            gauss_hermite_nodes: 64,
            t_panels: 200,
            tolerance: 1e-8,
            inner: InnerRule::Auto,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gauss_hermite_nodes < 8 {
            return Err(Error::Invalid(format!(
                "gauss_hermite_nodes must be at least 8, got {}",
                self.gauss_hermite_nodes
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Invalid(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.t_panels == 0 {
            return Err(Error::Invalid("t_panels must be positive".into()));
        }
        Ok(())
    }
}
