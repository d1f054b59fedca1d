//! Analytic regime prediction from KL conditions, and the empirical
//! measurements used to check predictions against simulated trajectories.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::BeliefHistory;
use crate::labels::{serialize_one_based, serialize_verdict};
use crate::likelihoods::{LikelihoodError, LikelihoodModel, MixtureSpec};
use crate::network::Network;
use crate::numerics::{least_squares_slope, std_dev};

/// Margins closer than this to a condition's boundary are not trusted.
pub const MARGIN_TOLERANCE: f64 = 1e-3;
/// Every truth-transmission probe divergence must exceed this.
pub const PROBE_TOLERANCE: f64 = 1e-6;
/// Belief mass treated as "gone" by the convergence classifier.
pub const VANISHING_BELIEF: f64 = 1e-3;

pub const COND_THM1_TRUE: &str = "thm1_true";
pub const COND_THM1_RATIO: &str = "thm1_ratio";
pub const COND_THM2_MIN_PROBE: &str = "thm2_min_probe";
pub const COND_LEM3: &str = "lem3";
pub const COND_LEM4: &str = "lem4";
/// `lem4` with the bound term added instead of subtracted. Diagnostic only;
/// never used for the prediction.
pub const COND_LEM4_ALT_SIGN: &str = "lem4_alt_sign";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Likelihood(#[from] LikelihoodError),
    #[error("hypotheses {true_hypothesis} and {tx} have identical likelihoods")]
    IndistinguishableHypotheses { true_hypothesis: usize, tx: usize },
    #[error("both sufficient conditions hold (lem3 margin {lem3}, lem4 margin {lem4})")]
    InternalInconsistency { lem3: f64, lem4: f64 },
    #[error("cannot measure rate: {0}")]
    Measurement(String),
    #[error("hypothesis {index} out of range for {count} hypotheses")]
    InvalidHypothesis { index: usize, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeStrategy {
    Partial,
    SelfAwarePartial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PredictedRegime {
    /// Belief on the true hypothesis goes to one.
    TruthLearning,
    /// Belief on the transmitted hypothesis goes to one (partial strategy).
    MislearnTx,
    /// Belief on the transmitted hypothesis vanishes and the rest split evenly.
    UniformSplit,
    /// Belief on the transmitted hypothesis goes to zero (self-aware).
    SufficientCondZero,
    /// Belief on the transmitted hypothesis goes to one (self-aware).
    SufficientCondOne,
    Inconclusive,
}

/// Empirical classification of a trajectory's tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConvergedTo(usize),
    UniformSplit,
    Oscillating,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalSummary {
    /// `final_beliefs[k][θ]` at the horizon.
    pub final_beliefs: Vec<Vec<f64>>,
    pub measured_rate: Option<f64>,
    #[serde(serialize_with = "serialize_verdict")]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub strategy: RegimeStrategy,
    #[serde(serialize_with = "serialize_one_based")]
    pub true_hypothesis: usize,
    #[serde(serialize_with = "serialize_one_based")]
    pub tx_hypothesis: usize,
    /// `D_KL[L(θ₀) ‖ L(θ_TX)]`.
    pub d_kl_true_vs_tx: f64,
    /// `D_KL[L(θ₀) ‖ P(θ_TXᶜ)]`.
    pub d_kl_true_vs_mixture: f64,
    /// Asymptotic slope of `log μ(θ)/μ(θ_TX)`, `θ ≠ θ_TX`.
    pub rate: f64,
    pub predicted: PredictedRegime,
    /// Limiting belief of each non-transmitted hypothesis under `UniformSplit`.
    pub limit_value: Option<f64>,
    /// Left-minus-right margin of each evaluated condition.
    pub condition_values: BTreeMap<String, f64>,
    pub empirical: Option<EmpiricalSummary>,
}

struct RateTerms {
    to_tx: f64,
    to_mixture: f64,
}

fn check_pair(model: &LikelihoodModel, true_hypothesis: usize, tx: usize) -> Result<(), AnalysisError> {
    let count = model.hypothesis_count();
    for index in [true_hypothesis, tx] {
        if index >= count {
            return Err(AnalysisError::InvalidHypothesis { index, count });
        }
    }
    Ok(())
}

fn rate_terms(model: &LikelihoodModel, true_hypothesis: usize, tx: usize) -> Result<RateTerms, AnalysisError> {
    check_pair(model, true_hypothesis, tx)?;
    let mixture = MixtureSpec::uniform_complement(model.hypothesis_count(), tx)?;
    Ok(RateTerms {
        to_tx: model.kl_divergence(true_hypothesis, tx)?,
        to_mixture: model.kl_divergence(true_hypothesis, mixture)?,
    })
}

/// `D_KL[L(θ₀)‖L(θ_TX)] − D_KL[L(θ₀)‖P(θ_TXᶜ)]`.
pub fn theoretical_rate(model: &LikelihoodModel, true_hypothesis: usize, tx: usize) -> Result<f64, AnalysisError> {
    let t = rate_terms(model, true_hypothesis, tx)?;
    Ok(t.to_tx - t.to_mixture)
}

fn base_report(strategy: RegimeStrategy, true_hypothesis: usize, tx: usize, terms: &RateTerms) -> RegimeReport {
    RegimeReport {
        strategy,
        true_hypothesis,
        tx_hypothesis: tx,
        d_kl_true_vs_tx: terms.to_tx,
        d_kl_true_vs_mixture: terms.to_mixture,
        rate: terms.to_tx - terms.to_mixture,
        predicted: PredictedRegime::Inconclusive,
        limit_value: None,
        condition_values: BTreeMap::new(),
        empirical: None,
    }
}

/// Belief-collapse prediction for the partial strategy.
pub fn predict_partial_regime(
    model: &LikelihoodModel,
    true_hypothesis: usize,
    tx: usize,
) -> Result<RegimeReport, AnalysisError> {
    let terms = rate_terms(model, true_hypothesis, tx)?;
    let mut report = base_report(RegimeStrategy::Partial, true_hypothesis, tx, &terms);
    let h = model.hypothesis_count();

    if tx == true_hypothesis {
        let margin = terms.to_mixture;
        report.condition_values.insert(COND_THM1_TRUE.into(), margin);
        if margin > MARGIN_TOLERANCE {
            report.predicted = PredictedRegime::TruthLearning;
        }
        return Ok(report);
    }

    if terms.to_tx == 0.0 {
        return Err(AnalysisError::IndistinguishableHypotheses { true_hypothesis, tx });
    }
    let margin = terms.to_mixture / terms.to_tx - 1.0;
    report.condition_values.insert(COND_THM1_RATIO.into(), margin);
    if margin > MARGIN_TOLERANCE {
        report.predicted = PredictedRegime::MislearnTx;
    } else if margin < -MARGIN_TOLERANCE {
        report.predicted = PredictedRegime::UniformSplit;
        report.limit_value = Some(1.0 / (h - 1) as f64);
    }
    Ok(report)
}

/// Sufficient-condition prediction for the self-aware partial strategy.
///
/// With `θ_TX = θ₀` the "for every pmf q" quantifier is screened with the
/// vertex mixtures (one per other hypothesis) plus the uniform mixture; this
/// is a necessary check, not a certificate.
pub fn predict_self_aware_regime(
    model: &LikelihoodModel,
    network: &Network,
    true_hypothesis: usize,
    tx: usize,
) -> Result<RegimeReport, AnalysisError> {
    let terms = rate_terms(model, true_hypothesis, tx)?;
    let mut report = base_report(RegimeStrategy::SelfAwarePartial, true_hypothesis, tx, &terms);
    let h = model.hypothesis_count();

    if tx == true_hypothesis {
        let mut min_probe = terms.to_mixture;
        for target in (0..h).filter(|&t| t != true_hypothesis) {
            let vertex = MixtureSpec::vertex(h, true_hypothesis, target)?;
            min_probe = min_probe.min(model.kl_divergence(true_hypothesis, vertex)?);
        }
        report.condition_values.insert(COND_THM2_MIN_PROBE.into(), min_probe);
        if min_probe > PROBE_TOLERANCE {
            report.predicted = PredictedRegime::TruthLearning;
        }
        return Ok(report);
    }

    let mut others = 0.0;
    for tau in (0..h).filter(|&t| t != tx) {
        others += model.kl_divergence(true_hypothesis, tau)?;
    }
    let lem3 = terms.to_tx - network.alpha() / (h - 1) as f64 * others;
    report.condition_values.insert(COND_LEM3.into(), lem3);

    let bound = match model.likelihood_bound(tx) {
        Ok(m) => m,
        Err(LikelihoodError::UnboundedLikelihood) if lem3 > MARGIN_TOLERANCE => {
            report.predicted = PredictedRegime::SufficientCondZero;
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    let weight = bound * network.lemma4_weight_sum();
    let lem4 = terms.to_mixture - terms.to_tx - weight;
    report.condition_values.insert(COND_LEM4.into(), lem4);
    report
        .condition_values
        .insert(COND_LEM4_ALT_SIGN.into(), terms.to_mixture - terms.to_tx + weight);

    report.predicted = match (lem3 > MARGIN_TOLERANCE, lem4 > MARGIN_TOLERANCE) {
        (true, true) => return Err(AnalysisError::InternalInconsistency { lem3, lem4 }),
        (true, false) => PredictedRegime::SufficientCondZero,
        (false, true) => PredictedRegime::SufficientCondOne,
        (false, false) => PredictedRegime::Inconclusive,
    };
    Ok(report)
}

/// Least-squares slope of agent 0's `log μ(θ)/μ(θ_TX)` against the
/// iteration index over `(burn_in, end]`.
pub fn measure_empirical_rate(
    history: &BeliefHistory,
    hypothesis: usize,
    tx: usize,
    burn_in: usize,
) -> Result<f64, AnalysisError> {
    let count = history.hypotheses();
    for index in [hypothesis, tx] {
        if index >= count {
            return Err(AnalysisError::InvalidHypothesis { index, count });
        }
    }
    if hypothesis == tx {
        return Err(AnalysisError::Measurement("hypothesis equals tx".into()));
    }
    let last = history.last_iteration();
    if last < burn_in + 2 {
        return Err(AnalysisError::Measurement(format!(
            "trajectory of {last} iterations is too short for burn-in {burn_in}"
        )));
    }
    let mut xs = Vec::with_capacity(last - burn_in);
    let mut ys = Vec::with_capacity(last - burn_in);
    for i in burn_in + 1..=last {
        let y = history.log_belief(i, 0, hypothesis) - history.log_belief(i, 0, tx);
        if !y.is_finite() {
            return Err(AnalysisError::Measurement(format!(
                "non-finite log-ratio at iteration {i}"
            )));
        }
        xs.push(i as f64);
        ys.push(y);
    }
    Ok(least_squares_slope(&xs, &ys))
}

fn window_range(history: &BeliefHistory, window: usize) -> std::ops::RangeInclusive<usize> {
    let last = history.last_iteration();
    let start = last.saturating_sub(window.max(1) - 1).max(1).min(last);
    start..=last
}

/// Classifies the last `window` iterations.
///
/// Checks in order: some hypothesis above `threshold` at every agent; an even
/// split of the non-transmitted hypotheses with `θ_TX` vanishing; at least
/// three sign changes of agent 0's log-ratio between the first two
/// non-transmitted hypotheses while `θ_TX` vanishes.
pub fn detect_convergence(history: &BeliefHistory, threshold: f64, window: usize, tx: Option<usize>) -> Verdict {
    if history.last_iteration() == 0 {
        return Verdict::Undecided;
    }
    let range = window_range(history, window);
    let agents = history.agents();
    let h = history.hypotheses();

    for theta in 0..h {
        let held = range
            .clone()
            .all(|i| (0..agents).all(|k| history.belief(i, k, theta) > threshold));
        if held {
            return Verdict::ConvergedTo(theta);
        }
    }

    let Some(tx) = tx.filter(|&t| t < h) else {
        return Verdict::Undecided;
    };
    let tx_vanished = range
        .clone()
        .all(|i| (0..agents).all(|k| history.belief(i, k, tx) < VANISHING_BELIEF));
    if !tx_vanished {
        return Verdict::Undecided;
    }

    let even = 1.0 / (h - 1) as f64;
    let split = range.clone().all(|i| {
        (0..agents).all(|k| {
            (0..h)
                .filter(|&t| t != tx)
                .all(|t| (history.belief(i, k, t) - even).abs() < VANISHING_BELIEF)
        })
    });
    if split {
        return Verdict::UniformSplit;
    }

    let mut rest = (0..h).filter(|&t| t != tx);
    if let (Some(a), Some(b)) = (rest.next(), rest.next()) {
        let mut changes = 0;
        let mut previous_sign = 0.0;
        for i in range {
            let r = history.log_belief(i, 0, a) - history.log_belief(i, 0, b);
            if r == 0.0 {
                continue;
            }
            let sign = r.signum();
            if previous_sign != 0.0 && sign != previous_sign {
                changes += 1;
            }
            previous_sign = sign;
        }
        if changes >= 3 {
            return Verdict::Oscillating;
        }
    }
    Verdict::Undecided
}

/// Standard deviation of agent `agent`'s `log μ(a)/μ(b)` over the last
/// `window` iterations.
pub fn oscillation_amplitude(history: &BeliefHistory, agent: usize, a: usize, b: usize, window: usize) -> f64 {
    let values: Vec<f64> = window_range(history, window)
        .map(|i| history.log_belief(i, agent, a) - history.log_belief(i, agent, b))
        .collect();
    std_dev(&values)
}

impl PredictedRegime {
    /// Whether an observed verdict (plus the tail belief on `θ_TX`) agrees
    /// with this prediction. `Inconclusive` agrees with anything.
    pub fn agrees_with(&self, verdict: Verdict, true_hypothesis: usize, tx: usize, tail_tx_belief: f64) -> bool {
        match self {
            PredictedRegime::TruthLearning => verdict == Verdict::ConvergedTo(true_hypothesis),
            PredictedRegime::MislearnTx | PredictedRegime::SufficientCondOne => verdict == Verdict::ConvergedTo(tx),
            PredictedRegime::UniformSplit => verdict == Verdict::UniformSplit,
            PredictedRegime::SufficientCondZero => tail_tx_belief < VANISHING_BELIEF,
            PredictedRegime::Inconclusive => true,
        }
    }
}

impl RegimeReport {
    /// Attaches final beliefs, a tail verdict and, where defined, the
    /// measured asymptotic slope for the first hypothesis other than `θ_TX`.
    pub fn attach_empirical(&mut self, history: &BeliefHistory, threshold: f64, window: usize, burn_in: usize) {
        let last = history.last_iteration();
        let final_beliefs = (0..history.agents())
            .map(|k| (0..history.hypotheses()).map(|t| history.belief(last, k, t)).collect())
            .collect();
        let other = (0..history.hypotheses()).find(|&t| t != self.tx_hypothesis);
        let measured_rate = other.and_then(|t| measure_empirical_rate(history, t, self.tx_hypothesis, burn_in).ok());
        let verdict = detect_convergence(history, threshold, window, Some(self.tx_hypothesis));
        self.empirical = Some(EmpiricalSummary {
            final_beliefs,
            measured_rate,
            verdict,
        });
    }
}
