//! Predicted vs. simulated regimes under partial sharing: truth learning,
//! mislearning of the transmitted hypothesis, and the uniform split.

use pbnet::analysis::{detect_convergence, measure_empirical_rate, predict_partial_regime};
use pbnet::fixtures::{default_topology, gaussian_family, DEFAULT_HORIZON};
use pbnet::{Engine, Network, NetworkState, SharingStrategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = gaussian_family();
    let network = Network::averaging(&default_topology(), 0.5)?;
    let models = [model.clone()];

    for tx in 0..3 {
        let report = predict_partial_regime(&model, 0, tx)?;
        let engine = Engine::new(&network, &models, 0, SharingStrategy::Partial { tx })?;
        let mut rng = ChaCha8Rng::seed_from_u64(tx as u64);
        let out = engine.run(
            NetworkState::uniform(network.len(), 3),
            DEFAULT_HORIZON,
            &mut rng,
            false,
        )?;
        let verdict = detect_convergence(&out.history, 0.999, 100, Some(tx));
        let last = out.history.last_iteration();
        let beliefs: Vec<String> = (0..3)
            .map(|t| format!("{:.4}", out.history.belief(last, 0, t)))
            .collect();
        println!(
            "tx={}: predicted {:?}, simulated {verdict}, agent 1 final [{}]",
            tx + 1,
            report.predicted,
            beliefs.join(", ")
        );
        if tx != 0 {
            let theta = if tx == 1 { 0 } else { 1 };
            let measured = measure_empirical_rate(&out.history, theta, tx, 500)?;
            println!("      rate: theory {:.4}, measured {measured:.4}", report.rate);
        }
    }
    Ok(())
}
