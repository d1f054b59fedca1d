//! Experiment orchestration: configs, seeded Monte Carlo runs, CSV export and
//! the bundled reproduction suites.

mod config;
mod export;
mod monte_carlo;
mod reproduce;

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::dynamics::DynamicsError;
use crate::likelihoods::LikelihoodError;
use crate::network::NetworkError;

pub use config::{
    load_config, parse_config, ConfigFile, HypothesesSection, InitialBeliefs, InitialBeliefsSection, LikelihoodSection,
    NetworkSection, Preset, SimulationConfig, StrategyName, Topology, SCHEMA_VERSION,
};
pub use export::{emit_plot_data, export_trajectories, plot_series, SeriesPoint, CSV_HEADER};
pub use monte_carlo::{
    run_monte_carlo, run_monte_carlo_with_threads, run_seed, run_single, threads_from_env, MonteCarloResult,
    RunFailure, Trajectory, THREADS_ENV,
};
pub use reproduce::{reproduce_paper, CriterionResult, Suite, SuiteReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("could not parse config: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("refusing to mix trajectories from configs {0} and {1} in one file")]
    MixedFingerprints(String, String),
    #[error("no trajectories to export")]
    NothingToExport,
    #[error("agent {agent} out of range for {agents} agents")]
    InvalidAgent { agent: usize, agents: usize },
    #[error("unknown suite `{0}` (expected fig_na, fig_sa, fig_oscill or fig_max)")]
    UnknownSuite(String),
    #[error(transparent)]
    Likelihood(#[from] LikelihoodError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl HarnessError {
    /// Process exit status: 1 for bad input, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        let numerical = |e: &LikelihoodError| matches!(e, LikelihoodError::NumericalFailure { .. });
        match self {
            HarnessError::Likelihood(e) if numerical(e) => 2,
            HarnessError::Analysis(AnalysisError::Likelihood(e)) if numerical(e) => 2,
            HarnessError::Dynamics(DynamicsError::NonFiniteBelief { .. }) => 2,
            HarnessError::Network(NetworkError::PerronNonConvergence(_)) => 2,
            HarnessError::Analysis(AnalysisError::InternalInconsistency { .. }) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
