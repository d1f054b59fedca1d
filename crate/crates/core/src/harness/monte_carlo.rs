use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use super::config::{InitialBeliefs, SimulationConfig};
use super::HarnessError;
use crate::dynamics::{BeliefHistory, BeliefVector, DynamicsError, Engine, NetworkState};
use crate::likelihoods::Observation;

/// Caps the worker pool; 0 or unset means one thread per core.
pub const THREADS_ENV: &str = "PBNET_THREADS";

/// One simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub fingerprint: String,
    pub run: usize,
    pub seed: u64,
    pub history: BeliefHistory,
    pub observations: Option<Vec<Vec<Observation>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub run: usize,
    pub seed: u64,
    pub error: DynamicsError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub fingerprint: String,
    /// Indexed by run number.
    pub runs: Vec<Result<Trajectory, RunFailure>>,
}

impl MonteCarloResult {
    pub fn trajectories(&self) -> Vec<Trajectory> {
        self.runs.iter().filter_map(|r| r.as_ref().ok().cloned()).collect()
    }

    pub fn failures(&self) -> Vec<&RunFailure> {
        self.runs.iter().filter_map(|r| r.as_ref().err()).collect()
    }
}

/// SplitMix64 over `master_seed + (run + 1)·γ`, so that run `r` can be
/// replayed on its own.
pub fn run_seed(master_seed: u64, run: usize) -> u64 {
    const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut z = master_seed.wrapping_add((run as u64).wrapping_add(1).wrapping_mul(GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

fn dirichlet_flat(hypotheses: usize, rng: &mut ChaCha8Rng) -> BeliefVector {
    // Normalized Exp(1) draws are Dirichlet(1, ..., 1).
    let log: Vec<f64> = (0..hypotheses)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            e.max(f64::MIN_POSITIVE).ln()
        })
        .collect();
    BeliefVector::from_log(log).expect("log of positive draws is finite")
}

fn initial_state(config: &SimulationConfig, rng: &mut ChaCha8Rng) -> NetworkState {
    let agents = config.network.len();
    let h = config.hypotheses.count();
    match &config.initial_beliefs {
        InitialBeliefs::Uniform => NetworkState::uniform(agents, h),
        InitialBeliefs::RandomDirichlet => NetworkState::new((0..agents).map(|_| dirichlet_flat(h, rng)).collect()),
        InitialBeliefs::Explicit(rows) => NetworkState::new(rows.clone()),
    }
}

/// Runs a single Monte Carlo replicate.
pub fn run_single(config: &SimulationConfig, run: usize) -> Result<Trajectory, DynamicsError> {
    let seed = run_seed(config.master_seed, run);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let models = std::slice::from_ref(&config.model);
    let engine = Engine::new(&config.network, models, config.hypotheses.true_index(), config.strategy)?;
    let initial = initial_state(config, &mut rng);
    let output = engine.run(initial, config.horizon, &mut rng, config.keep_observations)?;
    Ok(Trajectory {
        fingerprint: config.fingerprint(),
        run,
        seed,
        history: output.history,
        observations: output.observations,
    })
}

/// Runs every replicate using the thread count from [`THREADS_ENV`].
pub fn run_monte_carlo(config: &SimulationConfig) -> Result<MonteCarloResult, HarnessError> {
    run_monte_carlo_with_threads(config, threads_from_env())
}

/// Results are ordered by run index regardless of scheduling.
pub fn run_monte_carlo_with_threads(
    config: &SimulationConfig,
    threads: usize,
) -> Result<MonteCarloResult, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Io {
            path: "thread pool".into(),
            message: e.to_string(),
        })?;
    let runs = pool.install(|| {
        (0..config.mc_runs)
            .into_par_iter()
            .map(|run| {
                run_single(config, run).map_err(|error| RunFailure {
                    run,
                    seed: run_seed(config.master_seed, run),
                    error,
                })
            })
            .collect()
    });
    Ok(MonteCarloResult {
        fingerprint: config.fingerprint(),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_per_run_and_master() {
        assert_ne!(run_seed(0, 0), run_seed(0, 1));
        assert_ne!(run_seed(0, 0), run_seed(1, 0));
        assert_eq!(run_seed(42, 7), run_seed(42, 7));
    }

    #[test]
    fn dirichlet_draws_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let b = dirichlet_flat(3, &mut rng);
            assert!((b.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
