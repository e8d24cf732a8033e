//! Explicit normal-approximation bounds for `h(g(W))` via Stein's method,
//! chi-square approximation bounds for Pearson's statistic and the power
//! divergence family, and Monte Carlo audits of those bounds.

pub mod battery;
pub mod error;
pub mod limit_bounds;
pub mod monte_carlo;
pub mod power_divergence;
pub mod quadrature;
pub mod report;
pub mod selfcheck;
pub mod special_functions;
pub mod stein_solution;

pub use error::{Error, Result};
pub use limit_bounds::{
    cor33_bound, ew_moment_upper, make_moment_oracle, thm32_bound, EwPolicy, MomentFamily, MomentOracle,
    SumComponent, SumSpecification, TestFunctionNorms, TheoremPart,
};
pub use monte_carlo::{audit, AuditConfig, AuditRow, DistanceEstimate, EstimatorConfig, RngSeed, SmoothTest};
pub use power_divergence::{
    bound_pearson, bound_power_divergence, kolmogorov_bound_pd, pearson_statistic, power_divergence,
    AlphaPolicy, CountVector, MultinomialModel, StatMetric,
};
pub use report::{BoundReport, Metric};
pub use stein_solution::{
    CovarianceSpec, DominatingPolynomial, QuadratureConfig, SmoothFunction,
};
