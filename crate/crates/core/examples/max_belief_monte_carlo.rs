//! Monte Carlo over the max-belief strategy: every agent shares whichever
//! hypothesis it currently believes most. Random initial beliefs sometimes
//! lock the network onto a wrong hypothesis.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pbnet::analysis::detect_convergence;
use pbnet::harness::{load_config, run_monte_carlo};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    for name in ["max_belief_uniform.json", "max_belief_dirichlet.json"] {
        let config = load_config(dir.join(name))?;
        let result = run_monte_carlo(&config)?;
        let mut tally: BTreeMap<String, usize> = BTreeMap::new();
        for t in result.trajectories() {
            let verdict = detect_convergence(&t.history, 0.999, 100, None);
            *tally.entry(verdict.to_string()).or_default() += 1;
        }
        println!("{name}: {} runs -> {tally:?}", config.mc_runs);
    }
    Ok(())
}
