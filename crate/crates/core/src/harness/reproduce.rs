//! Bundled reference experiment suites (`fig_*`). Each suite
//! runs its configs, optionally writes plot data, and checks a fixed list of
//! pass/fail criteria.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::config::{
    ConfigFile, HypothesesSection, InitialBeliefsSection, LikelihoodSection, NetworkSection, Preset, SimulationConfig,
    StrategyName, Topology, SCHEMA_VERSION,
};
use super::export::emit_plot_data;
use super::monte_carlo::{run_monte_carlo, Trajectory};
use super::HarnessError;
use crate::analysis::{
    detect_convergence, oscillation_amplitude, predict_partial_regime, predict_self_aware_regime, PredictedRegime,
    Verdict,
};
use crate::fixtures::{discrete_pmf, DEFAULT_AGENTS, DEFAULT_HORIZON, GAUSSIAN_MEANS};

/// Belief level that counts as "converged".
pub const CONVERGENCE_THRESHOLD: f64 = 0.999;
/// Tail length inspected by the convergence classifier.
pub const VERDICT_WINDOW: usize = 100;
/// Tail length for oscillation amplitude.
pub const AMPLITUDE_WINDOW: usize = 500;
pub const SEEDS: usize = 3;
pub const MAX_BELIEF_RUNS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Partial sharing, Gaussian family, λ = 0.5, θ_TX ∈ {1, 2, 3}.
    FigNa,
    /// Self-aware sharing, bundled discrete family, λ = 0.03.
    FigSa,
    /// Self-aware sharing, oscillation amplitude at λ = 0.9 vs 0.99.
    FigOscill,
    /// Max-belief sharing with uniform and flat-Dirichlet starts.
    FigMax,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::FigNa, Suite::FigSa, Suite::FigOscill, Suite::FigMax];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::FigNa => "fig_na",
            Suite::FigSa => "fig_sa",
            Suite::FigOscill => "fig_oscill",
            Suite::FigMax => "fig_max",
        }
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| HarnessError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CriterionResult> {
        self.criteria.iter().filter(|c| !c.passed).collect()
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.criteria.push(CriterionResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}", self.suite.name())?;
        for c in &self.criteria {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "  [{mark}] {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

pub(crate) struct ExperimentSpec {
    pub likelihood: LikelihoodSection,
    pub tx_label: usize,
    pub strategy: StrategyName,
    pub lambda: f64,
    pub runs: usize,
    pub horizon: usize,
    pub seed: u64,
    pub initial: InitialBeliefsSection,
}

impl ExperimentSpec {
    pub fn config(&self) -> Result<SimulationConfig, HarnessError> {
        SimulationConfig::from_file(ConfigFile {
            schema_version: SCHEMA_VERSION,
            hypotheses: HypothesesSection {
                count: None,
                true_hypothesis: 1,
                tx_hypothesis: Some(self.tx_label),
            },
            likelihood: self.likelihood.clone(),
            network: NetworkSection {
                topology: Topology::Preset {
                    name: Preset::Ring,
                    agents: Some(DEFAULT_AGENTS),
                },
                lambda: self.lambda,
            },
            strategy: self.strategy,
            horizon: Some(self.horizon),
            mc_runs: Some(self.runs),
            master_seed: Some(self.seed),
            initial_beliefs: self.initial.clone(),
            keep_observations: false,
        })
    }
}

fn gaussian() -> LikelihoodSection {
    LikelihoodSection::Gaussian {
        means: GAUSSIAN_MEANS.to_vec(),
    }
}

fn discrete() -> LikelihoodSection {
    LikelihoodSection::Discrete { pmf: discrete_pmf() }
}

fn simulate(config: &SimulationConfig, plot_dir: Option<&Path>) -> Result<Vec<Trajectory>, HarnessError> {
    let result = run_monte_carlo(config)?;
    if let Some(failure) = result.failures().first() {
        return Err(HarnessError::Dynamics(failure.error.clone()));
    }
    let trajectories = result.trajectories();
    if let Some(dir) = plot_dir {
        emit_plot_data(&trajectories, 0, dir)?;
    }
    Ok(trajectories)
}

fn verdict(t: &Trajectory, tx: Option<usize>) -> Verdict {
    detect_convergence(&t.history, CONVERGENCE_THRESHOLD, VERDICT_WINDOW, tx)
}

fn verdict_list(verdicts: &[Verdict]) -> String {
    verdicts.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn max_tail_belief(t: &Trajectory, hypothesis: usize) -> f64 {
    let h = &t.history;
    let last = h.last_iteration();
    let start = last.saturating_sub(VERDICT_WINDOW - 1).max(1);
    (start..=last)
        .flat_map(|i| (0..h.agents()).map(move |k| h.belief(i, k, hypothesis)))
        .fold(0.0, f64::max)
}

fn sub_dir(base: Option<&Path>, name: &str) -> Option<std::path::PathBuf> {
    base.map(|b| b.join(name))
}

/// Runs one suite. When `out_dir` is given, plot data for agent 1 is written
/// beneath it.
pub fn reproduce_paper(suite: Suite, out_dir: Option<&Path>) -> Result<SuiteReport, HarnessError> {
    let mut report = SuiteReport {
        suite,
        criteria: Vec::new(),
    };
    let base = out_dir.map(|d| d.join(suite.name()));
    match suite {
        Suite::FigNa => fig_na(&mut report, base.as_deref())?,
        Suite::FigSa => fig_sa(&mut report, base.as_deref())?,
        Suite::FigOscill => fig_oscill(&mut report, base.as_deref())?,
        Suite::FigMax => fig_max(&mut report, base.as_deref())?,
    }
    Ok(report)
}

fn fig_na(report: &mut SuiteReport, base: Option<&Path>) -> Result<(), HarnessError> {
    let model = crate::fixtures::gaussian_family();
    let expectations = [
        (1, PredictedRegime::TruthLearning, Verdict::ConvergedTo(0)),
        (2, PredictedRegime::MislearnTx, Verdict::ConvergedTo(1)),
        (3, PredictedRegime::UniformSplit, Verdict::UniformSplit),
    ];
    for (tx_label, regime, expected) in expectations {
        let tx = tx_label - 1;
        let predicted = predict_partial_regime(&model, 0, tx)?;
        report.check(
            format!("fig_na tx={tx_label} prediction"),
            predicted.predicted == regime,
            format!("{:?} (rate {:.4})", predicted.predicted, predicted.rate),
        );
        let config = ExperimentSpec {
            likelihood: gaussian(),
            tx_label,
            strategy: StrategyName::Partial,
            lambda: 0.5,
            runs: SEEDS,
            horizon: DEFAULT_HORIZON,
            seed: 1,
            initial: InitialBeliefsSection::Uniform,
        }
        .config()?;
        let dir = sub_dir(base, &format!("tx{tx_label}"));
        let runs = simulate(&config, dir.as_deref())?;
        let verdicts: Vec<Verdict> = runs.iter().map(|t| verdict(t, Some(tx))).collect();
        report.check(
            format!("fig_na tx={tx_label} simulation"),
            verdicts.iter().all(|v| *v == expected),
            format!("expected {expected}, got [{}]", verdict_list(&verdicts)),
        );
    }
    Ok(())
}

fn fig_sa(report: &mut SuiteReport, base: Option<&Path>) -> Result<(), HarnessError> {
    let model = crate::fixtures::discrete_family();
    let lambda = 0.03;
    for tx_label in 1..=3 {
        let tx = tx_label - 1;
        let config = ExperimentSpec {
            likelihood: discrete(),
            tx_label,
            strategy: StrategyName::SelfAwarePartial,
            lambda,
            runs: SEEDS,
            horizon: DEFAULT_HORIZON,
            seed: 2,
            initial: InitialBeliefsSection::Uniform,
        }
        .config()?;
        let predicted = predict_self_aware_regime(&model, &config.network, 0, tx)?;
        let expected_regime = match tx_label {
            1 => PredictedRegime::TruthLearning,
            2 => PredictedRegime::SufficientCondOne,
            _ => PredictedRegime::SufficientCondZero,
        };
        let margins: Vec<String> = predicted
            .condition_values
            .iter()
            .map(|(k, v)| format!("{k}={v:.4}"))
            .collect();
        report.check(
            format!("fig_sa tx={tx_label} prediction"),
            predicted.predicted == expected_regime,
            format!("{:?} [{}]", predicted.predicted, margins.join(", ")),
        );

        let dir = sub_dir(base, &format!("tx{tx_label}"));
        let runs = simulate(&config, dir.as_deref())?;
        let verdicts: Vec<Verdict> = runs.iter().map(|t| verdict(t, Some(tx))).collect();
        let (passed, detail) = match tx_label {
            1 | 2 => (
                verdicts.iter().all(|v| *v == Verdict::ConvergedTo(tx)),
                format!("expected ConvergedTo({tx_label}), got [{}]", verdict_list(&verdicts)),
            ),
            _ => {
                let tail = runs.iter().map(|t| max_tail_belief(t, tx)).fold(0.0, f64::max);
                (
                    tail < 1e-3 && verdicts.iter().all(|v| *v == Verdict::Oscillating),
                    format!(
                        "max tail belief on 3 = {tail:.3e}, verdicts [{}]",
                        verdict_list(&verdicts)
                    ),
                )
            }
        };
        report.check(format!("fig_sa tx={tx_label} simulation"), passed, detail);
    }
    Ok(())
}

fn fig_oscill(report: &mut SuiteReport, base: Option<&Path>) -> Result<(), HarnessError> {
    let tx_label = 3;
    let tx = tx_label - 1;
    let mut amplitudes = Vec::new();
    for lambda in [0.9, 0.99] {
        let config = ExperimentSpec {
            likelihood: discrete(),
            tx_label,
            strategy: StrategyName::SelfAwarePartial,
            lambda,
            runs: SEEDS,
            horizon: DEFAULT_HORIZON,
            seed: 3,
            initial: InitialBeliefsSection::Uniform,
        }
        .config()?;
        let dir = sub_dir(base, &format!("lambda{lambda}"));
        let runs = simulate(&config, dir.as_deref())?;
        let tail = runs.iter().map(|t| max_tail_belief(t, tx)).fold(0.0, f64::max);
        report.check(
            format!("fig_oscill lambda={lambda} tx belief vanishes"),
            tail < 1e-3,
            format!("max tail belief on {tx_label} = {tail:.3e}"),
        );
        amplitudes.push(
            runs.iter()
                .map(|t| oscillation_amplitude(&t.history, 0, 0, 1, AMPLITUDE_WINDOW))
                .collect::<Vec<f64>>(),
        );
    }
    let increasing = amplitudes[0].iter().zip(&amplitudes[1]).all(|(lo, hi)| hi > lo);
    report.check(
        "fig_oscill amplitude grows with lambda",
        increasing,
        format!(
            "std log(mu1/mu2): lambda=0.9 {:?}, lambda=0.99 {:?}",
            amplitudes[0], amplitudes[1]
        ),
    );
    Ok(())
}

fn fig_max(report: &mut SuiteReport, base: Option<&Path>) -> Result<(), HarnessError> {
    for (name, initial) in [
        ("uniform", InitialBeliefsSection::Uniform),
        ("dirichlet", InitialBeliefsSection::RandomDirichlet),
    ] {
        let config = ExperimentSpec {
            likelihood: gaussian(),
            tx_label: 1,
            strategy: StrategyName::MaxBelief,
            lambda: 0.5,
            runs: MAX_BELIEF_RUNS,
            horizon: DEFAULT_HORIZON,
            seed: 4,
            initial,
        }
        .config()?;
        let dir = sub_dir(base, name);
        let runs = simulate(&config, dir.as_deref())?;
        let verdicts: Vec<Verdict> = runs.iter().map(|t| verdict(t, None)).collect();
        let count = |target: usize| verdicts.iter().filter(|v| **v == Verdict::ConvergedTo(target)).count();
        let (truth, second) = (count(0), count(1));
        let detail = format!("{truth}/{} ConvergedTo(1), {second} ConvergedTo(2)", verdicts.len());
        if name == "uniform" {
            report.check("fig_max uniform init learns the truth", truth == verdicts.len(), detail);
        } else {
            report.check(
                "fig_max random init mislearns sometimes",
                second >= 1 && 2 * truth >= verdicts.len(),
                detail,
            );
        }
    }
    Ok(())
}
