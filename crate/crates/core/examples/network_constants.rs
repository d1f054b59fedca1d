//! Perron vectors and the weight constants that enter the self-aware
//! sufficient conditions, for presets and a seeded random graph.

use pbnet::{Adjacency, Network};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn describe(name: &str, adjacency: &Adjacency, lambda: f64) -> Result<(), Box<dyn std::error::Error>> {
    let network = Network::averaging(adjacency, lambda)?;
    let perron: Vec<String> = network.perron().iter().map(|v| format!("{v:.4}")).collect();
    println!(
        "{name:<10} N={:<3} lambda={lambda:<5} alpha={:.12} weight_sum={:.12}\n           perron [{}]",
        network.len(),
        network.alpha(),
        network.lemma4_weight_sum(),
        perron.join(", ")
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    describe("ring", &Adjacency::ring(10), 0.5)?;
    describe("star", &Adjacency::star(6), 0.3)?;
    describe("complete", &Adjacency::complete(5), 0.9)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let random = Adjacency::random_strongly_connected(12, 0.25, &mut rng)?;
    describe("random", &random, 0.03)?;

    // A hand-built column-stochastic matrix: the averaging-rule identities no
    // longer hold.
    let summary = Network::from_matrix(pbnet::CombinationMatrix::from_rows(&[
        vec![0.5, 0.2, 0.3],
        vec![0.3, 0.6, 0.1],
        vec![0.2, 0.2, 0.6],
    ])?)?
    .summary();
    println!("\ncustom matrix: {}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
