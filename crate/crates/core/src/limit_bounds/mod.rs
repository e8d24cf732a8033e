//! Distance bounds between `g(W)` and `g(Z)` for standardized sums `W`.

mod ew;
mod oracle;
mod theorem;

pub use ew::{ew_moment_upper, EwBound, EwPolicy};
pub use oracle::{make_moment_oracle, normal_moment, MomentFamily, MomentOracle, MomentTable};
pub use theorem::{
    collect_coefficients, cor33_bound, thm32_bound, univariate_expansion, CoefficientKey,
    MomentFactor, SymbolicTerm, TheoremPart,
};

use crate::error::{Error, Result};
use crate::special_functions::h_weight;
use serde::{Deserialize, Serialize};

/// Sup-norms `‖h'‖, …, ‖h^{(K)}‖` of a test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TestFunctionNorms {
    norms: Vec<f64>,
}

impl TestFunctionNorms {
    pub fn new(norms: Vec<f64>) -> Result<Self> {
        if norms.is_empty() {
            return Err(Error::Invalid("at least one derivative norm is required".into()));
        }
        if let Some(v) = norms.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Invalid(format!("norms must be finite and nonnegative, got {v}")));
        }
        Ok(Self { norms })
    }

    /// `(‖h'‖, ‖h''‖)`.
    pub fn pair(first: f64, second: f64) -> Result<Self> {
        Self::new(vec![first, second])
    }

    /// Norms of `h(w) = w`.
    pub fn identity() -> Self {
        let mut norms = vec![0.0; 12];
        norms[0] = 1.0;
        Self { norms }
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.norms.get(i).copied())
    }

    /// `h_n = Σ_{k≤n} {n brace k} ‖h^{(k)}‖`.
    pub fn h_n(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Invalid("h_n needs n >= 1".into()));
        }
        if n > self.norms.len() {
            return Err(Error::Invalid(format!(
                "h_{n} needs {n} derivative norms, only {} supplied",
                self.norms.len()
            )));
        }
        h_weight(&self.norms[..n])
    }

    /// `h̃_p = Σ_{j≤p} ‖h^{(j)}‖`.
    pub fn h_tilde(&self, p: usize) -> Result<f64> {
        if p == 0 || p > self.norms.len() {
            return Err(Error::Invalid(format!(
                "h~_{p} needs {p} derivative norms, {} supplied",
                self.norms.len()
            )));
        }
        Ok(self.norms[..p].iter().sum())
    }
}

/// One coordinate `W_j = n_j^{-1/2} Σ_i X_ij` with i.i.d. summands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumComponent {
    pub n: u64,
    pub oracle: MomentOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumSpecification {
    pub components: Vec<SumComponent>,
}

impl SumSpecification {
    pub fn new(components: Vec<SumComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("sum specification needs at least one component".into()));
        }
        if components.iter().any(|c| c.n == 0) {
            return Err(Error::Invalid("every component needs n_j >= 1".into()));
        }
        Ok(Self { components })
    }

    pub fn univariate(n: u64, oracle: MomentOracle) -> Result<Self> {
        Self::new(vec![SumComponent { n, oracle }])
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}
