//! Social learning over strongly connected networks where agents share only
//! part of their belief vector.
//!
//! * [`likelihoods`]: hypotheses, observation models, KL divergences.
//! * [`network`]: left-stochastic combination matrices and their constants.
//! * [`dynamics`]: the Bayesian-update / share / combine iteration.
//! * [`analysis`]: regime prediction and empirical checks.
//! * [`harness`]: configs, Monte Carlo runs, CSV output, bundled suites.

pub mod analysis;
pub mod dynamics;
pub mod fixtures;
pub mod harness;
pub mod labels;
pub mod likelihoods;
pub mod network;
pub mod numerics;
mod quadrature;

pub use analysis::{PredictedRegime, RegimeReport, Verdict};
pub use dynamics::{BeliefHistory, BeliefVector, Engine, NetworkState, SharingStrategy};
pub use harness::{HarnessError, SimulationConfig, Trajectory};
pub use likelihoods::{Component, HypothesisSet, LikelihoodModel, MixtureSpec, Observation};
pub use network::{Adjacency, CombinationMatrix, Network};
