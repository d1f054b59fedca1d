use pbnet::dynamics::RunOutput;
use pbnet::fixtures::{default_topology, discrete_family, gaussian_family};
use pbnet::{BeliefVector, Component, Engine, LikelihoodModel, MixtureSpec, Network, NetworkState, SharingStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(agents: usize, hypotheses: usize, rng: &mut impl Rng) -> NetworkState {
    NetworkState::new(
        (0..agents)
            .map(|_| {
                let raw: Vec<f64> = (0..hypotheses).map(|_| rng.random_range(0.05..1.0)).collect();
                let total: f64 = raw.iter().sum();
                BeliefVector::from_probabilities(&raw.iter().map(|v| v / total).collect::<Vec<_>>()).unwrap()
            })
            .collect(),
    )
}

fn simulate(
    network: &Network,
    model: &LikelihoodModel,
    strategy: SharingStrategy,
    horizon: usize,
    seed: u64,
) -> RunOutput {
    let models = [model.clone()];
    let engine = Engine::new(network, &models, 0, strategy).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = random_state(network.len(), model.hypothesis_count(), &mut rng);
    engine.run(initial, horizon, &mut rng, true).unwrap()
}

#[test]
fn partial_sharing_equalizes_untransmitted_beliefs() {
    let model = LikelihoodModel::gaussian(vec![0.0, 0.3, 0.7, 1.2]).unwrap();
    let network = Network::averaging(&default_topology(), 0.5).unwrap();
    for seed in 0..3 {
        let tx = 1;
        let out = simulate(&network, &model, SharingStrategy::Partial { tx }, 300, seed);
        let h = &out.history;
        for i in 1..=h.last_iteration() {
            for k in 0..h.agents() {
                let others: Vec<f64> = [0, 2, 3].iter().map(|&t| h.belief(i, k, t)).collect();
                for v in &others {
                    assert!((v - others[0]).abs() < 1e-9, "iteration {i} agent {k}: {others:?}");
                }
            }
        }
    }
}

#[test]
fn partial_recursion_oracle() {
    let network = Network::averaging(&default_topology(), 0.5).unwrap();
    for (model, tx) in [(gaussian_family(), 2), (gaussian_family(), 1), (discrete_family(), 2)] {
        let h_count = model.hypothesis_count();
        let mixture = Component::Mixture(MixtureSpec::uniform_complement(h_count, tx).unwrap());
        for seed in 0..3 {
            let out = simulate(&network, &model, SharingStrategy::Partial { tx }, 1000, seed);
            let (h, obs) = (&out.history, out.observations.as_ref().unwrap());
            let theta = (0..h_count).find(|&t| t != tx).unwrap();
            let mut worst: f64 = 0.0;
            for i in 2..=h.last_iteration() {
                for k in 0..h.agents() {
                    let lhs = h.log_belief(i, k, theta) - h.log_belief(i, k, tx);
                    let rhs: f64 = (0..h.agents())
                        .map(|l| {
                            let a = network.weight(l, k);
                            if a == 0.0 {
                                return 0.0;
                            }
                            let xi = obs[i - 1][l];
                            let prev = h.log_belief(i - 1, l, theta) - h.log_belief(i - 1, l, tx);
                            let p = model.component_log_density(&mixture, xi).unwrap();
                            let l_tx = model.log_likelihood(tx, xi).unwrap();
                            a * (prev + p - l_tx)
                        })
                        .sum();
                    worst = worst.max((lhs - rhs).abs());
                }
            }
            assert!(worst < 1e-8, "tx {tx} seed {seed}: deviation {worst:e}");
        }
    }
}

#[test]
fn self_aware_recursion_oracle() {
    let model = discrete_family();
    let network = Network::averaging(&default_topology(), 0.03).unwrap();
    let tx = 2;
    for seed in 0..3 {
        let out = simulate(&network, &model, SharingStrategy::SelfAwarePartial { tx }, 1000, seed);
        let (h, obs) = (&out.history, out.observations.as_ref().unwrap());
        let mut worst: f64 = 0.0;
        for i in 1..=h.last_iteration() {
            for (k, &xi) in obs[i - 1].iter().enumerate() {
                let akk = network.weight(k, k);
                let lhs = h.log_belief(i, k, 0) - h.log_belief(i, k, 1);
                let rhs = akk
                    * (h.log_belief(i - 1, k, 0) - h.log_belief(i - 1, k, 1) + model.log_likelihood(0, xi).unwrap()
                        - model.log_likelihood(1, xi).unwrap());
                worst = worst.max((lhs - rhs).abs());
            }
        }
        assert!(worst < 1e-8, "seed {seed}: deviation {worst:e}");
    }
}

#[test]
fn two_hypotheses_partial_equals_full() {
    let model = LikelihoodModel::gaussian(vec![0.0, 0.5]).unwrap();
    let network = Network::averaging(&default_topology(), 0.5).unwrap();
    for tx in 0..2 {
        for seed in 0..3 {
            let partial = simulate(&network, &model, SharingStrategy::Partial { tx }, 500, seed);
            let full = simulate(&network, &model, SharingStrategy::Full, 500, seed);
            for i in 0..=500 {
                for k in 0..network.len() {
                    for t in 0..2 {
                        let d = (partial.history.belief(i, k, t) - full.history.belief(i, k, t)).abs();
                        assert!(d < 1e-12, "tx {tx} seed {seed} iteration {i}: {d:e}");
                    }
                }
            }
        }
    }
}

#[test]
fn full_sharing_learns_truth() {
    let network = Network::averaging(&default_topology(), 0.5).unwrap();
    let out = simulate(&network, &gaussian_family(), SharingStrategy::Full, 2000, 9);
    let h = &out.history;
    for k in 0..h.agents() {
        assert!(h.belief(h.last_iteration(), k, 0) > 0.999);
    }
}

#[test]
fn runs_are_deterministic_per_seed() {
    let network = Network::averaging(&default_topology(), 0.5).unwrap();
    for strategy in [
        SharingStrategy::Partial { tx: 2 },
        SharingStrategy::SelfAwarePartial { tx: 1 },
        SharingStrategy::MaxBelief { self_aware: false },
        SharingStrategy::MaxBelief { self_aware: true },
    ] {
        let a = simulate(&network, &gaussian_family(), strategy, 200, 5);
        let b = simulate(&network, &gaussian_family(), strategy, 200, 5);
        assert_eq!(a, b);
        let c = simulate(&network, &gaussian_family(), strategy, 200, 6);
        assert_ne!(a.history, c.history);
    }
}

#[test]
fn engine_rejects_bad_input() {
    let network = Network::averaging(&default_topology(), 0.5).unwrap();
    let models = [gaussian_family()];
    assert!(Engine::new(&network, &models, 3, SharingStrategy::Full).is_err());
    assert!(Engine::new(&network, &models, 0, SharingStrategy::Partial { tx: 5 }).is_err());
    let two = [gaussian_family(), gaussian_family()];
    assert!(Engine::new(&network, &two, 0, SharingStrategy::Full).is_err());
    let engine = Engine::new(&network, &models, 0, SharingStrategy::Full).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(engine.run(NetworkState::uniform(3, 3), 10, &mut rng, false).is_err());
}
