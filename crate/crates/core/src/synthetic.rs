//! Seeded synthetic market data for tests, examples and benchmarks.
//!
//! Returns follow a one-factor model in percent per month:
//! `r_it = a_i + b_i f_t + e_it`, with the market factor `f_t ~ N(0, 3^2)` and
//! idiosyncratic noise `e_it ~ N(0, s_i^2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::market_data::{estimate_moments, AssetUniverse, ReturnsMatrix, DEFAULT_CARBON_RANGE};

/// Asset ids `F1..Fn`.
pub fn asset_ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("F{i}")).collect()
}

/// A `periods x n` panel of monthly percent returns.
pub fn returns(n: usize, periods: usize, seed: u64) -> Result<ReturnsMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.6)).collect();
    let beta: Vec<f64> = (0..n).map(|_| rng.random_range(0.4..1.3)).collect();
    let idio: Vec<f64> = (0..n).map(|_| rng.random_range(0.8..3.0)).collect();
    let factor = Normal::new(0.0, 3.0).expect("valid normal");
    let mut rows = Vec::with_capacity(periods);
    for _ in 0..periods {
        let f = factor.sample(&mut rng);
        let row = (0..n)
            .map(|i| {
                let e: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal) * idio[i];
                round6(alpha[i] + beta[i] * f + e)
            })
            .collect();
        rows.push(row);
    }
    ReturnsMatrix::new(asset_ids(n), rows, "month")
}

/// Carbon risk scores drawn uniformly from `[0, 10]`, two decimals.
pub fn carbon_scores(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_ca4b);
    (0..n)
        .map(|_| (rng.random_range(0.0..10.0f64) * 100.0).round() / 100.0)
        .collect()
}

/// Instance estimated from [`returns`] and [`carbon_scores`].
pub fn instance(n: usize, periods: usize, seed: u64) -> Result<AssetUniverse> {
    let r = returns(n, periods, seed)?;
    estimate_moments(&r, &carbon_scores(n, seed), DEFAULT_CARBON_RANGE)
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}
