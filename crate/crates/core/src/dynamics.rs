//! The social-learning step: Bayesian update, partial-sharing modification
//! and log-linear combination, all carried out on log-beliefs.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::likelihoods::{LikelihoodError, LikelihoodModel, Observation};
use crate::network::{Network, NetworkError};
use crate::numerics::{argmax_lowest, log_sum_exp, normalize_log};

pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Likelihood(#[from] LikelihoodError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("invalid belief vector: {0}")]
    InvalidBelief(String),
    #[error("expected 1 or {agents} likelihood models, got {models}")]
    ModelCount { agents: usize, models: usize },
    #[error("likelihood models disagree on the number of hypotheses")]
    HypothesisMismatch,
    #[error("hypothesis {index} out of range for {count} hypotheses")]
    InvalidHypothesis { index: usize, count: usize },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite log-belief at agent {agent}, iteration {iteration}")]
    NonFiniteBelief { agent: usize, iteration: usize },
}

/// A probability vector over hypotheses, held as natural-log values.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefVector {
    log: Vec<f64>,
}

impl BeliefVector {
    pub fn uniform(hypotheses: usize) -> Self {
        Self {
            log: vec![-(hypotheses as f64).ln(); hypotheses],
        }
    }

    /// Entries must be strictly positive; they are renormalized.
    pub fn from_probabilities(probabilities: &[f64]) -> Result<Self, DynamicsError> {
        if probabilities.len() < 2 {
            return Err(DynamicsError::InvalidBelief("need at least 2 hypotheses".into()));
        }
        if let Some(i) = probabilities.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(DynamicsError::InvalidBelief(format!(
                "entry {i} = {} is not strictly positive",
                probabilities[i]
            )));
        }
        Self::from_log(probabilities.iter().map(|p| p.ln()).collect())
    }

    /// Normalizes arbitrary finite log-weights.
    pub fn from_log(mut log: Vec<f64>) -> Result<Self, DynamicsError> {
        if log.iter().any(|v| !v.is_finite()) {
            return Err(DynamicsError::InvalidBelief("log-weights must be finite".into()));
        }
        normalize_log(&mut log);
        Ok(Self { log })
    }

    pub fn len(&self) -> usize {
        self.log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log.is_empty()
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log
    }

    pub fn log_probability(&self, hypothesis: usize) -> f64 {
        self.log[hypothesis]
    }

    pub fn probability(&self, hypothesis: usize) -> f64 {
        self.log[hypothesis].exp()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log.iter().map(|v| v.exp()).collect()
    }

    /// `log μ(a) / μ(b)`.
    pub fn log_ratio(&self, a: usize, b: usize) -> f64 {
        self.log[a] - self.log[b]
    }

    pub fn is_finite(&self) -> bool {
        self.log.iter().all(|v| v.is_finite())
    }

    fn normalized(mut log: Vec<f64>) -> Self {
        normalize_log(&mut log);
        Self { log }
    }
}

/// What an agent transmits to its neighbours.
///
/// `MaxBelief` breaks ties by the lowest hypothesis index. Its self-aware
/// form is accepted by the engine but flagged as an extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SharingStrategy {
    Full,
    Partial { tx: usize },
    SelfAwarePartial { tx: usize },
    MaxBelief { self_aware: bool },
}

impl SharingStrategy {
    pub fn is_self_aware(&self) -> bool {
        matches!(
            self,
            SharingStrategy::SelfAwarePartial { .. } | SharingStrategy::MaxBelief { self_aware: true }
        )
    }

    pub fn is_extension(&self) -> bool {
        matches!(self, SharingStrategy::MaxBelief { self_aware: true })
    }

    /// The fixed transmitted hypothesis, if the strategy has one.
    pub fn fixed_tx(&self) -> Option<usize> {
        match self {
            SharingStrategy::Partial { tx } | SharingStrategy::SelfAwarePartial { tx } => Some(*tx),
            _ => None,
        }
    }

    /// Hypothesis whose component gets shared for intermediate belief `psi`.
    pub fn shared_hypothesis(&self, psi: &BeliefVector) -> Option<usize> {
        match self {
            SharingStrategy::Full => None,
            SharingStrategy::Partial { tx } | SharingStrategy::SelfAwarePartial { tx } => Some(*tx),
            SharingStrategy::MaxBelief { .. } => Some(argmax_lowest(psi.log_values())),
        }
    }
}

/// Per-iteration snapshot of every agent's belief.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub beliefs: Vec<BeliefVector>,
    pub iteration: usize,
}

impl NetworkState {
    pub fn new(beliefs: Vec<BeliefVector>) -> Self {
        Self { beliefs, iteration: 0 }
    }

    pub fn uniform(agents: usize, hypotheses: usize) -> Self {
        Self::new(vec![BeliefVector::uniform(hypotheses); agents])
    }
}

/// Bayes' rule in the log domain given `log L(ξ|θ)` for every θ.
pub fn bayes_log(prior: &BeliefVector, log_likelihoods: &[f64]) -> BeliefVector {
    let log = prior.log.iter().zip(log_likelihoods).map(|(m, l)| m + l).collect();
    BeliefVector::normalized(log)
}

/// `ψ(θ) ∝ μ(θ) L(ξ|θ)`.
pub fn bayesian_update(
    prior: &BeliefVector,
    model: &LikelihoodModel,
    observation: Observation,
) -> Result<BeliefVector, DynamicsError> {
    if prior.len() != model.hypothesis_count() {
        return Err(DynamicsError::LengthMismatch {
            expected: model.hypothesis_count(),
            got: prior.len(),
        });
    }
    let logs = model.log_likelihoods(observation)?;
    Ok(bayes_log(prior, &logs))
}

/// Keeps the component of `shared` and spreads `1 - ψ(shared)` evenly over
/// the rest.
pub fn split_remaining_mass(psi: &BeliefVector, shared: usize) -> BeliefVector {
    let h = psi.len();
    // log(1 - ψ(shared)) summed from the other components stays accurate when
    // ψ(shared) is close to 1.
    let others: Vec<f64> = psi
        .log
        .iter()
        .enumerate()
        .filter(|(t, _)| *t != shared)
        .map(|(_, v)| *v)
        .collect();
    let spread = log_sum_exp(&others) - ((h - 1) as f64).ln();
    let log = (0..h)
        .map(|t| if t == shared { psi.log[shared] } else { spread })
        .collect();
    BeliefVector { log }
}

/// The belief an agent transmits under `strategy`.
pub fn modify_for_sharing(psi: &BeliefVector, strategy: &SharingStrategy) -> BeliefVector {
    match strategy.shared_hypothesis(psi) {
        None => psi.clone(),
        Some(t) => split_remaining_mass(psi, t),
    }
}

/// Log-linear pooling. Non-self-aware strategies combine every agent's
/// shared belief (their own included); self-aware ones swap in the agent's
/// own unmodified belief for the `a_kk` term.
pub fn combine_step(
    network: &Network,
    own: &[BeliefVector],
    shared: &[BeliefVector],
    strategy: &SharingStrategy,
) -> Vec<BeliefVector> {
    let n = network.len();
    let h = own[0].len();
    let self_aware = strategy.is_self_aware();
    (0..n)
        .map(|k| {
            let mut log = vec![0.0; h];
            for (l, theirs) in shared.iter().enumerate() {
                let a = network.weight(l, k);
                if a == 0.0 {
                    continue;
                }
                let source = if self_aware && l == k { &own[k] } else { theirs };
                for (acc, v) in log.iter_mut().zip(&source.log) {
                    *acc += a * v;
                }
            }
            BeliefVector::normalized(log)
        })
        .collect()
}

/// Log-beliefs for every iteration of a run, flattened as
/// `[iteration][agent][hypothesis]`. Iteration 0 is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefHistory {
    agents: usize,
    hypotheses: usize,
    data: Vec<f64>,
}

impl BeliefHistory {
    pub fn new(initial: &NetworkState) -> Self {
        let agents = initial.beliefs.len();
        let hypotheses = initial.beliefs.first().map_or(0, BeliefVector::len);
        let mut history = Self {
            agents,
            hypotheses,
            data: Vec::new(),
        };
        history.push(&initial.beliefs);
        history
    }

    pub fn push(&mut self, beliefs: &[BeliefVector]) {
        for b in beliefs {
            self.data.extend_from_slice(b.log_values());
        }
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn hypotheses(&self) -> usize {
        self.hypotheses
    }

    /// Number of stored states, including the initial one.
    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.agents * self.hypotheses).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the last iteration (the horizon, once the run is done).
    pub fn last_iteration(&self) -> usize {
        self.len().saturating_sub(1)
    }

    pub fn log_beliefs(&self, iteration: usize, agent: usize) -> &[f64] {
        let start = (iteration * self.agents + agent) * self.hypotheses;
        &self.data[start..start + self.hypotheses]
    }

    pub fn log_belief(&self, iteration: usize, agent: usize, hypothesis: usize) -> f64 {
        self.log_beliefs(iteration, agent)[hypothesis]
    }

    pub fn belief(&self, iteration: usize, agent: usize, hypothesis: usize) -> f64 {
        self.log_belief(iteration, agent, hypothesis).exp()
    }

    pub fn state(&self, iteration: usize) -> Vec<BeliefVector> {
        (0..self.agents)
            .map(|k| BeliefVector {
                log: self.log_beliefs(iteration, k).to_vec(),
            })
            .collect()
    }
}

/// Output of [`Engine::run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub history: BeliefHistory,
    /// `observations[i][k]` is agent `k`'s sample at iteration `i + 1`.
    pub observations: Option<Vec<Vec<Observation>>>,
}

/// Everything needed to advance a network state: topology, per-agent
/// likelihoods, the true hypothesis and the sharing strategy.
#[derive(Debug, Clone)]
pub struct Engine<'a> {
    network: &'a Network,
    models: &'a [LikelihoodModel],
    true_hypothesis: usize,
    strategy: SharingStrategy,
    hypotheses: usize,
}

impl<'a> Engine<'a> {
    /// `models` holds either one model shared by all agents or one per agent.
    pub fn new(
        network: &'a Network,
        models: &'a [LikelihoodModel],
        true_hypothesis: usize,
        strategy: SharingStrategy,
    ) -> Result<Self, DynamicsError> {
        network.revalidate()?;
        let agents = network.len();
        if models.len() != 1 && models.len() != agents {
            return Err(DynamicsError::ModelCount {
                agents,
                models: models.len(),
            });
        }
        let hypotheses = models[0].hypothesis_count();
        if models.iter().any(|m| m.hypothesis_count() != hypotheses) {
            return Err(DynamicsError::HypothesisMismatch);
        }
        for index in [Some(true_hypothesis), strategy.fixed_tx()].into_iter().flatten() {
            if index >= hypotheses {
                return Err(DynamicsError::InvalidHypothesis {
                    index,
                    count: hypotheses,
                });
            }
        }
        Ok(Self {
            network,
            models,
            true_hypothesis,
            strategy,
            hypotheses,
        })
    }

    pub fn network(&self) -> &Network {
        self.network
    }

    pub fn strategy(&self) -> SharingStrategy {
        self.strategy
    }

    pub fn hypotheses(&self) -> usize {
        self.hypotheses
    }

    pub fn model(&self, agent: usize) -> &LikelihoodModel {
        if self.models.len() == 1 {
            &self.models[0]
        } else {
            &self.models[agent]
        }
    }

    pub fn validate_state(&self, state: &NetworkState) -> Result<(), DynamicsError> {
        if state.beliefs.len() != self.network.len() {
            return Err(DynamicsError::LengthMismatch {
                expected: self.network.len(),
                got: state.beliefs.len(),
            });
        }
        for b in &state.beliefs {
            if b.len() != self.hypotheses {
                return Err(DynamicsError::LengthMismatch {
                    expected: self.hypotheses,
                    got: b.len(),
                });
            }
            let total: f64 = b.probabilities().iter().sum();
            if !b.is_finite() || (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(DynamicsError::InvalidBelief(format!(
                    "belief sums to {total} or has non-finite entries"
                )));
            }
        }
        Ok(())
    }

    /// Draws `ξ_{k,i} ~ L(·|θ₀)` for every agent, in agent order.
    pub fn draw_observations<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Observation>, DynamicsError> {
        (0..self.network.len())
            .map(|k| Ok(self.model(k).sample(self.true_hypothesis, rng)?))
            .collect()
    }

    /// Intermediate (post-Bayes) beliefs for the given observations.
    pub fn intermediate(
        &self,
        state: &NetworkState,
        observations: &[Observation],
    ) -> Result<Vec<BeliefVector>, DynamicsError> {
        if observations.len() != self.network.len() {
            return Err(DynamicsError::LengthMismatch {
                expected: self.network.len(),
                got: observations.len(),
            });
        }
        state
            .beliefs
            .iter()
            .zip(observations)
            .enumerate()
            .map(|(k, (prior, xi))| bayesian_update(prior, self.model(k), *xi))
            .collect()
    }

    /// One full iteration with externally supplied observations.
    pub fn step_with_observations(
        &self,
        state: &NetworkState,
        observations: &[Observation],
    ) -> Result<NetworkState, DynamicsError> {
        let own = self.intermediate(state, observations)?;
        let shared: Vec<BeliefVector> = own.iter().map(|psi| modify_for_sharing(psi, &self.strategy)).collect();
        let beliefs = combine_step(self.network, &own, &shared, &self.strategy);
        let iteration = state.iteration + 1;
        if let Some(agent) = beliefs.iter().position(|b| !b.is_finite()) {
            return Err(DynamicsError::NonFiniteBelief { agent, iteration });
        }
        Ok(NetworkState { beliefs, iteration })
    }

    /// Draws fresh observations and advances one iteration.
    pub fn run_iteration<R: Rng + ?Sized>(
        &self,
        state: &NetworkState,
        rng: &mut R,
    ) -> Result<(NetworkState, Vec<Observation>), DynamicsError> {
        let observations = self.draw_observations(rng)?;
        let next = self.step_with_observations(state, &observations)?;
        Ok((next, observations))
    }

    /// Runs `horizon` iterations from `initial`.
    pub fn run<R: Rng + ?Sized>(
        &self,
        initial: NetworkState,
        horizon: usize,
        rng: &mut R,
        keep_observations: bool,
    ) -> Result<RunOutput, DynamicsError> {
        self.validate_state(&initial)?;
        let mut history = BeliefHistory::new(&initial);
        let mut observations = keep_observations.then(|| Vec::with_capacity(horizon));
        let mut state = initial;
        for _ in 0..horizon {
            let (next, obs) = self.run_iteration(&state, rng)?;
            history.push(&next.beliefs);
            if let Some(all) = observations.as_mut() {
                all.push(obs);
            }
            state = next;
        }
        Ok(RunOutput { history, observations })
    }
}
