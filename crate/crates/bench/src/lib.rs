//! Shared fixtures for the benchmarks in `benches/`.

use stein_bounds::monte_carlo::{sample_statistic, RngSeed, StatisticKind};
use stein_bounds::MultinomialModel;

/// Seed used by every benchmark fixture.
pub const SEED: u64 = 20_240_601;

pub fn pearson_model() -> MultinomialModel {
    MultinomialModel::new(10_000, 0.3).expect("valid model")
}

/// `count` draws of Pearson's statistic at `n = 10^4`, `p1 = 0.3`.
pub fn pearson_samples(count: usize) -> Vec<f64> {
    let kind = StatisticKind::Pearson { model: pearson_model() };
    sample_statistic(&kind, count, RngSeed::new(SEED), 0).expect("sampling succeeds")
}
