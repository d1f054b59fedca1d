//! Bundled experiment ingredients.
//!
//! The Gaussian family has unit variance and means 0, 0.2, 1. The discrete
//! rows were chosen so that at λ = 0.03 the "belief → 1" condition holds for
//! hypothesis 2, the "belief → 0" condition holds for hypothesis 3, and
//! `M = 3.5` exactly when hypothesis 2 is excluded.

use crate::likelihoods::LikelihoodModel;
use crate::network::Adjacency;

/// Agent count used by the presets when none is given.
pub const DEFAULT_AGENTS: usize = 10;
pub const DEFAULT_HORIZON: usize = 5000;

pub const GAUSSIAN_MEANS: [f64; 3] = [0.0, 0.2, 1.0];

pub fn gaussian_family() -> LikelihoodModel {
    LikelihoodModel::gaussian(GAUSSIAN_MEANS.to_vec()).expect("bundled means are finite")
}

/// `L(0|3)` is set so that `log L(0|1)/L(0|3) = 3.5`.
pub fn discrete_pmf() -> Vec<Vec<f64>> {
    let low = 0.8 * (-3.5f64).exp();
    vec![
        vec![0.80, 0.15, 0.05],
        vec![0.70, 0.20, 0.10],
        vec![low, 0.30, 0.70 - low],
    ]
}

pub fn discrete_family() -> LikelihoodModel {
    LikelihoodModel::discrete(discrete_pmf()).expect("bundled pmf is valid")
}

/// Ring of [`DEFAULT_AGENTS`] agents with self-loops.
pub fn default_topology() -> Adjacency {
    Adjacency::ring(DEFAULT_AGENTS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_bound_is_three_and_a_half() {
        let m = discrete_family().likelihood_bound(1).unwrap();
        assert!((m - 3.5).abs() < 1e-12);
    }
}
