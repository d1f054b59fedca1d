//! Loads a config, runs it, and writes the trajectory CSV and per-hypothesis
//! plot series. Usage: `cargo run --example export_csv -- [config] [out-dir]`.

use std::path::PathBuf;

use pbnet::harness::{emit_plot_data, export_trajectories, load_config, run_monte_carlo};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config_path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/partial_tx3.json"));
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pbnet-export"));

    let config = load_config(&config_path)?;
    println!(
        "config {} (fingerprint {})",
        config_path.display(),
        &config.fingerprint()[..12]
    );
    let trajectories = run_monte_carlo(&config)?.trajectories();
    std::fs::create_dir_all(&out)?;
    let csv = out.join("trajectories.csv");
    export_trajectories(&trajectories, &csv)?;
    println!("wrote {}", csv.display());
    for path in emit_plot_data(&trajectories, 0, out.join("plot"))? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
