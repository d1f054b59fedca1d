//! JSON experiment configuration.
//!
//! Hypotheses and agents are one-based in the file. A minimal config:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "hypotheses": { "count": 3, "true_hypothesis": 1, "tx_hypothesis": 2 },
//!   "likelihood": { "family": "gaussian", "means": [0.0, 0.2, 1.0] },
//!   "network": { "topology": { "kind": "preset", "name": "ring", "agents": 10 }, "lambda": 0.5 },
//!   "strategy": "partial",
//!   "horizon": 5000,
//!   "mc_runs": 3,
//!   "master_seed": 7,
//!   "initial_beliefs": "uniform"
//! }
//! ```

use std::path::Path;

use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::dynamics::{BeliefVector, SharingStrategy, NORMALIZATION_TOLERANCE};
use crate::fixtures::{DEFAULT_AGENTS, DEFAULT_HORIZON};
use crate::labels::{from_label, to_label};
use crate::likelihoods::{HypothesisSet, LikelihoodModel, PROBABILITY_TOLERANCE};
use crate::network::{Adjacency, Network};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub hypotheses: HypothesesSection,
    pub likelihood: LikelihoodSection,
    pub network: NetworkSection,
    pub strategy: StrategyName,
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub mc_runs: Option<usize>,
    #[serde(default)]
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub initial_beliefs: InitialBeliefsSection,
    #[serde(default)]
    pub keep_observations: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesesSection {
    /// Defaults to the number of likelihood rows.
    #[serde(default)]
    pub count: Option<usize>,
    pub true_hypothesis: usize,
    #[serde(default)]
    pub tx_hypothesis: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum LikelihoodSection {
    Gaussian { means: Vec<f64> },
    Discrete { pmf: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub topology: Topology,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Topology {
    Preset {
        name: Preset,
        #[serde(default)]
        agents: Option<usize>,
    },
    /// `adjacency[ℓ][k] = 1` when agent ℓ+1 is a neighbour of agent k+1.
    Explicit { adjacency: Vec<Vec<u8>> },
    Random {
        agents: usize,
        edge_probability: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Ring,
    Complete,
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    Full,
    Partial,
    SelfAwarePartial,
    MaxBelief,
    MaxBeliefSelfAware,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialBeliefsSection {
    #[default]
    Uniform,
    RandomDirichlet,
    /// One row per agent.
    Explicit(Vec<Vec<f64>>),
}

/// How each run's starting beliefs are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialBeliefs {
    Uniform,
    /// Flat Dirichlet, drawn independently per agent and per run.
    RandomDirichlet,
    Explicit(Vec<BeliefVector>),
}

/// A fully validated experiment.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub hypotheses: HypothesisSet,
    pub model: LikelihoodModel,
    pub network: Network,
    pub strategy: SharingStrategy,
    pub horizon: usize,
    pub mc_runs: usize,
    pub master_seed: u64,
    pub initial_beliefs: InitialBeliefs,
    pub keep_observations: bool,
    source: ConfigFile,
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> HarnessError {
    HarnessError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SimulationConfig, HarnessError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<SimulationConfig, HarnessError> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
    SimulationConfig::from_file(file)
}

fn validate_pmf(pmf: &[Vec<f64>]) -> Result<(), HarnessError> {
    if pmf.len() < 2 {
        return Err(invalid("likelihood.pmf", "need at least 2 rows"));
    }
    let support = pmf[0].len();
    for (i, row) in pmf.iter().enumerate() {
        let field = format!("likelihood.pmf[{i}]");
        if row.len() != support || support == 0 {
            return Err(invalid(field, format!("expected {support} entries, got {}", row.len())));
        }
        if let Some(j) = row.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(invalid(format!("{field}[{j}]"), "entries must be strictly positive"));
        }
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(invalid(field, format!("row sums to {total}, expected 1")));
        }
    }
    Ok(())
}

fn build_model(section: &LikelihoodSection) -> Result<LikelihoodModel, HarnessError> {
    match section {
        LikelihoodSection::Gaussian { means } => {
            if means.len() < 2 {
                return Err(invalid("likelihood.means", "need at least 2 means"));
            }
            if let Some(i) = means.iter().position(|m| !m.is_finite()) {
                return Err(invalid(format!("likelihood.means[{i}]"), "mean must be finite"));
            }
            LikelihoodModel::gaussian(means.clone()).map_err(|e| invalid("likelihood", e.to_string()))
        }
        LikelihoodSection::Discrete { pmf } => {
            validate_pmf(pmf)?;
            LikelihoodModel::discrete(pmf.clone()).map_err(|e| invalid("likelihood.pmf", e.to_string()))
        }
    }
}

fn build_topology(topology: &Topology) -> Result<Adjacency, HarnessError> {
    match topology {
        Topology::Preset { name, agents } => {
            let n = agents.unwrap_or(DEFAULT_AGENTS);
            if n == 0 {
                return Err(invalid("network.topology.agents", "must be at least 1"));
            }
            Ok(match name {
                Preset::Ring => Adjacency::ring(n),
                Preset::Complete => Adjacency::complete(n),
                Preset::Star => Adjacency::star(n),
            })
        }
        Topology::Explicit { adjacency } => {
            let n = adjacency.len();
            for (l, row) in adjacency.iter().enumerate() {
                if row.len() != n {
                    return Err(invalid(
                        format!("network.topology.adjacency[{l}]"),
                        format!("expected {n} entries, got {}", row.len()),
                    ));
                }
                if let Some(k) = row.iter().position(|v| *v > 1) {
                    return Err(invalid(
                        format!("network.topology.adjacency[{l}][{k}]"),
                        "entries must be 0 or 1",
                    ));
                }
            }
            let rows: Vec<Vec<bool>> = adjacency.iter().map(|r| r.iter().map(|v| *v == 1).collect()).collect();
            Adjacency::from_rows(&rows).map_err(|e| invalid("network.topology.adjacency", e.to_string()))
        }
        Topology::Random {
            agents,
            edge_probability,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Adjacency::random_strongly_connected(*agents, *edge_probability, &mut rng)
                .map_err(|e| invalid("network.topology", e.to_string()))
        }
    }
}

impl SimulationConfig {
    pub fn from_file(mut file: ConfigFile) -> Result<Self, HarnessError> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", file.schema_version),
            ));
        }
        let model = build_model(&file.likelihood)?;
        let count = file.hypotheses.count.unwrap_or(model.hypothesis_count());
        if count != model.hypothesis_count() {
            return Err(invalid(
                "hypotheses.count",
                format!(
                    "{count} hypotheses but the likelihood defines {}",
                    model.hypothesis_count()
                ),
            ));
        }
        let true_index = from_label(file.hypotheses.true_hypothesis, count)
            .ok_or_else(|| invalid("hypotheses.true_hypothesis", format!("must be in 1..={count}")))?;
        let needs_tx = matches!(file.strategy, StrategyName::Partial | StrategyName::SelfAwarePartial);
        let tx_index = match file.hypotheses.tx_hypothesis {
            Some(label) => from_label(label, count)
                .ok_or_else(|| invalid("hypotheses.tx_hypothesis", format!("must be in 1..={count}")))?,
            None if needs_tx => {
                return Err(invalid(
                    "hypotheses.tx_hypothesis",
                    "required by the partial strategies",
                ));
            }
            None => true_index,
        };
        let hypotheses =
            HypothesisSet::new(count, true_index, tx_index).map_err(|e| invalid("hypotheses", e.to_string()))?;

        let adjacency = build_topology(&file.network.topology)?;
        let network =
            Network::averaging(&adjacency, file.network.lambda).map_err(|e| invalid("network", e.to_string()))?;

        let strategy = match file.strategy {
            StrategyName::Full => SharingStrategy::Full,
            StrategyName::Partial => SharingStrategy::Partial { tx: tx_index },
            StrategyName::SelfAwarePartial => SharingStrategy::SelfAwarePartial { tx: tx_index },
            StrategyName::MaxBelief => SharingStrategy::MaxBelief { self_aware: false },
            StrategyName::MaxBeliefSelfAware => SharingStrategy::MaxBelief { self_aware: true },
        };

        let horizon = *file.horizon.get_or_insert(DEFAULT_HORIZON);
        if horizon < 1 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        let mc_runs = *file.mc_runs.get_or_insert(1);
        if mc_runs < 1 {
            return Err(invalid("mc_runs", "must be at least 1"));
        }
        if file.master_seed.is_none() {
            info!("master_seed not set; defaulting to 0");
        }
        let master_seed = *file.master_seed.get_or_insert(0);

        let initial_beliefs = match &file.initial_beliefs {
            InitialBeliefsSection::Uniform => InitialBeliefs::Uniform,
            InitialBeliefsSection::RandomDirichlet => InitialBeliefs::RandomDirichlet,
            InitialBeliefsSection::Explicit(rows) => {
                if rows.len() != network.len() {
                    return Err(invalid(
                        "initial_beliefs.explicit",
                        format!("expected {} rows, got {}", network.len(), rows.len()),
                    ));
                }
                let mut beliefs = Vec::with_capacity(rows.len());
                for (k, row) in rows.iter().enumerate() {
                    let field = format!("initial_beliefs.explicit[{k}]");
                    if row.len() != count {
                        return Err(invalid(field, format!("expected {count} entries, got {}", row.len())));
                    }
                    let total: f64 = row.iter().sum();
                    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                        return Err(invalid(field, format!("row sums to {total}, expected 1")));
                    }
                    beliefs.push(BeliefVector::from_probabilities(row).map_err(|e| invalid(field, e.to_string()))?);
                }
                InitialBeliefs::Explicit(beliefs)
            }
        };

        Ok(Self {
            hypotheses,
            model,
            network,
            strategy,
            horizon,
            mc_runs,
            master_seed,
            initial_beliefs,
            keep_observations: file.keep_observations,
            source: file,
        })
    }

    /// The config as it would be written back out, defaults filled in.
    pub fn to_file(&self) -> &ConfigFile {
        &self.source
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self.source.master_seed = Some(seed);
        self
    }

    pub fn with_runs(mut self, runs: usize) -> Result<Self, HarnessError> {
        if runs < 1 {
            return Err(invalid("mc_runs", "must be at least 1"));
        }
        self.mc_runs = runs;
        self.source.mc_runs = Some(runs);
        Ok(self)
    }

    pub fn with_horizon(mut self, horizon: usize) -> Result<Self, HarnessError> {
        if horizon < 1 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        self.horizon = horizon;
        self.source.horizon = Some(horizon);
        Ok(self)
    }

    /// SHA-256 of the normalized config JSON, hex encoded.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_vec(&self.source).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn true_label(&self) -> usize {
        to_label(self.hypotheses.true_index())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAUSSIAN_PARTIAL: &str = r#"{
        "schema_version": 1,
        "hypotheses": { "count": 3, "true_hypothesis": 1, "tx_hypothesis": 2 },
        "likelihood": { "family": "gaussian", "means": [0.0, 0.2, 1.0] },
        "network": { "topology": { "kind": "preset", "name": "ring", "agents": 10 }, "lambda": 0.5 },
        "strategy": "partial",
        "horizon": 100,
        "master_seed": 3
    }"#;

    #[test]
    fn gaussian_config_is_valid() {
        let c = parse_config(GAUSSIAN_PARTIAL).unwrap();
        assert_eq!(c.strategy, SharingStrategy::Partial { tx: 1 });
        assert_eq!(c.network.len(), 10);
        assert_eq!(c.mc_runs, 1);
        assert_eq!(c.master_seed, 3);
    }

    #[test]
    fn bad_pmf_row_names_field() {
        let text = r#"{
            "schema_version": 1,
            "hypotheses": { "true_hypothesis": 1, "tx_hypothesis": 1 },
            "likelihood": { "family": "discrete", "pmf": [[0.5, 0.3, 0.1], [0.2, 0.3, 0.5]] },
            "network": { "topology": { "kind": "preset", "name": "complete", "agents": 3 }, "lambda": 0.5 },
            "strategy": "partial"
        }"#;
        match parse_config(text) {
            Err(HarnessError::Validation { field, .. }) => assert_eq!(field, "likelihood.pmf[0]"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn missing_seed_defaults_to_zero() {
        let text = GAUSSIAN_PARTIAL.replace(r#""master_seed": 3"#, r#""mc_runs": 2"#);
        let c = parse_config(&text).unwrap();
        assert_eq!(c.master_seed, 0);
        assert_eq!(c.to_file().master_seed, Some(0));
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = parse_config(GAUSSIAN_PARTIAL).unwrap();
        let b = parse_config(GAUSSIAN_PARTIAL).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
        let c = b.with_seed(4);
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn partial_requires_tx() {
        let text = GAUSSIAN_PARTIAL.replace(r#", "tx_hypothesis": 2"#, "");
        match parse_config(&text) {
            Err(HarnessError::Validation { field, .. }) => assert_eq!(field, "hypotheses.tx_hypothesis"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_beliefs_must_be_normalized() {
        let text = r#"{
            "schema_version": 1,
            "hypotheses": { "true_hypothesis": 1 },
            "likelihood": { "family": "gaussian", "means": [0.0, 1.0] },
            "network": { "topology": { "kind": "explicit", "adjacency": [[1, 1], [1, 1]] }, "lambda": 0.5 },
            "strategy": "full",
            "initial_beliefs": { "explicit": [[0.5, 0.5], [0.9, 0.2]] }
        }"#;
        match parse_config(text) {
            Err(HarnessError::Validation { field, .. }) => assert_eq!(field, "initial_beliefs.explicit[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let text = GAUSSIAN_PARTIAL.replace(r#""horizon": 100"#, r#""horizn": 100"#);
        assert!(matches!(parse_config(&text), Err(HarnessError::Parse(_))));
        let text = GAUSSIAN_PARTIAL.replace(r#""schema_version": 1"#, r#""schema_version": 2"#);
        assert!(matches!(parse_config(&text), Err(HarnessError::Validation { .. })));
    }

    #[test]
    fn out_of_range_labels() {
        let text = GAUSSIAN_PARTIAL.replace(r#""true_hypothesis": 1"#, r#""true_hypothesis": 0"#);
        match parse_config(&text) {
            Err(HarnessError::Validation { field, .. }) => assert_eq!(field, "hypotheses.true_hypothesis"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
