use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::warn;

use pbnet::analysis::{predict_partial_regime, predict_self_aware_regime};
use pbnet::dynamics::SharingStrategy;
use pbnet::harness::{
    emit_plot_data, export_trajectories, load_config, reproduce_paper, run_monte_carlo, run_single, HarnessError,
    SimulationConfig, Suite,
};

const EXIT_ACCEPTANCE: u8 = 3;

#[derive(Parser)]
#[command(name = "pbnet", version, about = "Partial-belief social learning simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo experiment described by a config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides mc_runs.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value = "pbnet-out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Print the predicted regime as JSON.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Also simulate run 0 and attach the empirical verdict.
        #[arg(long)]
        empirical: bool,
    },
    /// Network utilities.
    Network {
        #[command(subcommand)]
        command: NetworkCommand,
    },
    /// Run one of the bundled reference suites and check its criteria.
    Reproduce {
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum NetworkCommand {
    /// Print agent count, connectivity, Perron vector and weight constants.
    Describe {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Outcome {
    Ok,
    AcceptanceFailed,
}

fn load(path: &Path, seed: Option<u64>, runs: Option<usize>) -> Result<SimulationConfig, HarnessError> {
    let mut config = load_config(path)?;
    if let Some(seed) = seed {
        config = config.with_seed(seed);
    }
    if let Some(runs) = runs {
        config = config.with_runs(runs)?;
    }
    Ok(config)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn simulate(config: &SimulationConfig, out: &Path) -> Result<Outcome, HarnessError> {
    let result = run_monte_carlo(config)?;
    for failure in result.failures() {
        warn!("run {} (seed {}) failed: {}", failure.run, failure.seed, failure.error);
    }
    let trajectories = result.trajectories();
    std::fs::create_dir_all(out).map_err(|e| HarnessError::Io {
        path: out.display().to_string(),
        message: e.to_string(),
    })?;
    export_trajectories(&trajectories, out.join("trajectories.csv"))?;
    emit_plot_data(&trajectories, 0, out.join("plot"))?;
    let manifest = serde_json::json!({
        "fingerprint": result.fingerprint,
        "config": config.to_file(),
        "runs": result.runs.iter().enumerate().map(|(r, run)| match run {
            Ok(t) => serde_json::json!({ "run": r, "seed": t.seed, "status": "ok" }),
            Err(f) => serde_json::json!({ "run": r, "seed": f.seed, "status": f.error.to_string() }),
        }).collect::<Vec<_>>(),
    });
    let manifest_path = out.join("manifest.json");
    std::fs::write(&manifest_path, to_json(&manifest)).map_err(|e| HarnessError::Io {
        path: manifest_path.display().to_string(),
        message: e.to_string(),
    })?;
    if let Some(failure) = result.failures().first() {
        return Err(HarnessError::Dynamics(failure.error.clone()));
    }
    Ok(Outcome::Ok)
}

fn analyze(config: &SimulationConfig, empirical: bool) -> Result<Outcome, HarnessError> {
    let truth = config.hypotheses.true_index();
    let mut report = match config.strategy {
        SharingStrategy::Partial { tx } => predict_partial_regime(&config.model, truth, tx)?,
        SharingStrategy::SelfAwarePartial { tx } => {
            predict_self_aware_regime(&config.model, &config.network, truth, tx)?
        }
        _ => {
            return Err(HarnessError::Validation {
                field: "strategy".into(),
                message: "analysis covers the partial and self_aware_partial strategies".into(),
            })
        }
    };
    if empirical {
        let trajectory = run_single(config, 0)?;
        let burn_in = config.horizon / 10;
        report.attach_empirical(&trajectory.history, 0.999, 100.min(config.horizon), burn_in);
    }
    println!("{}", to_json(&report));
    Ok(Outcome::Ok)
}

fn run(cli: Cli) -> Result<Outcome, HarnessError> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            runs,
            out,
            format: Format::Csv,
        } => simulate(&load(&config, seed, runs)?, &out),
        Command::Analyze { config, empirical } => analyze(&load(&config, None, None)?, empirical),
        Command::Network {
            command: NetworkCommand::Describe { config },
        } => {
            let config = load(&config, None, None)?;
            println!("{}", to_json(&config.network.summary()));
            Ok(Outcome::Ok)
        }
        Command::Reproduce { suite, out } => {
            let suite: Suite = suite.parse()?;
            let report = reproduce_paper(suite, out.as_deref())?;
            print!("{report}");
            if report.passed() {
                Ok(Outcome::Ok)
            } else {
                for f in report.failures() {
                    eprintln!("failed: {}", f.name);
                }
                Ok(Outcome::AcceptanceFailed)
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::AcceptanceFailed) => ExitCode::from(EXIT_ACCEPTANCE),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
