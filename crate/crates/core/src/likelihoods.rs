//! Hypotheses, per-hypothesis observation models and the KL machinery built on
//! top of them.
//!
//! Hypotheses are addressed by zero-based `usize` indices throughout the
//! library. Configuration files and reports use one-based labels instead; the
//! conversion happens in [`crate::harness`].

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::log_sum_exp;
use crate::quadrature;

/// Row-sum tolerance for discrete pmfs and mixture weights.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;
/// Absolute tolerance for the KL quadrature.
pub const KL_QUADRATURE_TOLERANCE: f64 = 1e-6;
/// Integration half-width around the extreme means, in standard deviations.
pub const GAUSSIAN_TRUNCATION_SIGMAS: f64 = 10.0;
const MAX_QUADRATURE_INTERVALS: usize = 4096;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LikelihoodError {
    #[error("hypothesis index {index} out of range for {count} hypotheses")]
    InvalidHypothesis { index: usize, count: usize },
    #[error("invalid observation {observation:?} for this model")]
    InvalidObservation { observation: Observation },
    #[error("invalid likelihood model: {0}")]
    InvalidModel(String),
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
    #[error("KL quadrature did not reach tolerance {tolerance:e} (estimate {estimate}, error {error:e})")]
    NumericalFailure { tolerance: f64, estimate: f64, error: f64 },
    #[error("log-likelihood ratios are unbounded for the Gaussian family")]
    UnboundedLikelihood,
}

/// The hypothesis set Θ together with the true and transmitted hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypothesisSet {
    count: usize,
    true_index: usize,
    tx_index: usize,
}

impl HypothesisSet {
    pub fn new(count: usize, true_index: usize, tx_index: usize) -> Result<Self, LikelihoodError> {
        if count < 2 {
            return Err(LikelihoodError::InvalidModel(format!(
                "need at least 2 hypotheses, got {count}"
            )));
        }
        for index in [true_index, tx_index] {
            if index >= count {
                return Err(LikelihoodError::InvalidHypothesis { index, count });
            }
        }
        Ok(Self {
            count,
            true_index,
            tx_index,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn true_index(&self) -> usize {
        self.true_index
    }

    pub fn tx_index(&self) -> usize {
        self.tx_index
    }
}

/// A single data sample. Gaussian models emit `Real`, discrete models emit a
/// support index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Observation {
    Real(f64),
    Index(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LikelihoodModel {
    /// Unit-variance Gaussians, one mean per hypothesis.
    Gaussian { means: Vec<f64> },
    /// Finite support `0..S`; `pmf[θ][ξ]`.
    Discrete { pmf: Vec<Vec<f64>> },
}

/// Mixture `Σ_τ q(τ) L(ξ|τ)` over every hypothesis except `excluded`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    excluded: usize,
    // Full-length; weights[excluded] == 0.
    weights: Vec<f64>,
}

impl MixtureSpec {
    /// `weights` has one entry per hypothesis; the excluded slot must be zero.
    pub fn new(excluded: usize, weights: Vec<f64>) -> Result<Self, LikelihoodError> {
        let count = weights.len();
        if excluded >= count {
            return Err(LikelihoodError::InvalidHypothesis { index: excluded, count });
        }
        if weights[excluded] != 0.0 {
            return Err(LikelihoodError::InvalidMixture(format!(
                "weight on excluded hypothesis {excluded} must be 0"
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(LikelihoodError::InvalidMixture(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(LikelihoodError::InvalidMixture(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { excluded, weights })
    }

    /// Uniform weights `1/(H-1)` on every hypothesis other than `excluded`.
    pub fn uniform_complement(count: usize, excluded: usize) -> Result<Self, LikelihoodError> {
        if count < 2 {
            return Err(LikelihoodError::InvalidMixture(
                "complement mixture needs at least 2 hypotheses".into(),
            ));
        }
        if excluded >= count {
            return Err(LikelihoodError::InvalidHypothesis { index: excluded, count });
        }
        let w = 1.0 / (count - 1) as f64;
        let weights = (0..count).map(|t| if t == excluded { 0.0 } else { w }).collect();
        Ok(Self { excluded, weights })
    }

    /// Point mass on `target`, excluding `excluded`.
    pub fn vertex(count: usize, excluded: usize, target: usize) -> Result<Self, LikelihoodError> {
        if target >= count {
            return Err(LikelihoodError::InvalidHypothesis { index: target, count });
        }
        let weights = (0..count).map(|t| if t == target { 1.0 } else { 0.0 }).collect();
        Self::new(excluded, weights)
    }

    pub fn excluded(&self) -> usize {
        self.excluded
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Argument to [`LikelihoodModel::kl_divergence`].
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Hypothesis(usize),
    Mixture(MixtureSpec),
}

impl From<usize> for Component {
    fn from(index: usize) -> Self {
        Component::Hypothesis(index)
    }
}

impl From<MixtureSpec> for Component {
    fn from(mixture: MixtureSpec) -> Self {
        Component::Mixture(mixture)
    }
}

impl LikelihoodModel {
    pub fn gaussian(means: Vec<f64>) -> Result<Self, LikelihoodError> {
        if means.len() < 2 {
            return Err(LikelihoodError::InvalidModel(
                "need a mean for at least 2 hypotheses".into(),
            ));
        }
        if let Some(i) = means.iter().position(|m| !m.is_finite()) {
            return Err(LikelihoodError::InvalidModel(format!("means[{i}] is not finite")));
        }
        Ok(LikelihoodModel::Gaussian { means })
    }

    /// Every row must sum to 1 and every entry must be strictly positive, so
    /// that all log-likelihood ratios are finite.
    pub fn discrete(pmf: Vec<Vec<f64>>) -> Result<Self, LikelihoodError> {
        if pmf.len() < 2 {
            return Err(LikelihoodError::InvalidModel(
                "need a pmf row for at least 2 hypotheses".into(),
            ));
        }
        let support = pmf[0].len();
        if support == 0 {
            return Err(LikelihoodError::InvalidModel("empty support".into()));
        }
        for (row_index, row) in pmf.iter().enumerate() {
            if row.len() != support {
                return Err(LikelihoodError::InvalidModel(format!(
                    "pmf[{row_index}] has {} entries, expected {support}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
                return Err(LikelihoodError::InvalidModel(format!(
                    "pmf[{row_index}][{j}] must be strictly positive"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
                return Err(LikelihoodError::InvalidModel(format!(
                    "pmf[{row_index}] sums to {total}, expected 1"
                )));
            }
        }
        Ok(LikelihoodModel::Discrete { pmf })
    }

    /// Skips the positivity and normalization checks. Only for tests that
    /// need degenerate rows.
    #[doc(hidden)]
    pub fn discrete_unchecked(pmf: Vec<Vec<f64>>) -> Self {
        LikelihoodModel::Discrete { pmf }
    }

    pub fn hypothesis_count(&self) -> usize {
        match self {
            LikelihoodModel::Gaussian { means } => means.len(),
            LikelihoodModel::Discrete { pmf } => pmf.len(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, LikelihoodModel::Discrete { .. })
    }

    fn check_hypothesis(&self, index: usize) -> Result<(), LikelihoodError> {
        let count = self.hypothesis_count();
        if index >= count {
            Err(LikelihoodError::InvalidHypothesis { index, count })
        } else {
            Ok(())
        }
    }

    pub fn check_observation(&self, observation: Observation) -> Result<(), LikelihoodError> {
        let ok = match (self, observation) {
            (LikelihoodModel::Gaussian { .. }, Observation::Real(x)) => x.is_finite(),
            (LikelihoodModel::Discrete { pmf }, Observation::Index(j)) => j < pmf[0].len(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(LikelihoodError::InvalidObservation { observation })
        }
    }

    /// `L(ξ|θ)`.
    pub fn likelihood(&self, hypothesis: usize, observation: Observation) -> Result<f64, LikelihoodError> {
        self.log_likelihood(hypothesis, observation).map(f64::exp)
    }

    /// `log L(ξ|θ)`, evaluated directly in the log domain.
    pub fn log_likelihood(&self, hypothesis: usize, observation: Observation) -> Result<f64, LikelihoodError> {
        self.check_hypothesis(hypothesis)?;
        self.check_observation(observation)?;
        Ok(match (self, observation) {
            (LikelihoodModel::Gaussian { means }, Observation::Real(x)) => gaussian_log_pdf(x, means[hypothesis]),
            (LikelihoodModel::Discrete { pmf }, Observation::Index(j)) => pmf[hypothesis][j].ln(),
            _ => unreachable!("observation validated above"),
        })
    }

    /// `log L(ξ|θ)` for every hypothesis, in index order.
    pub fn log_likelihoods(&self, observation: Observation) -> Result<Vec<f64>, LikelihoodError> {
        (0..self.hypothesis_count())
            .map(|t| self.log_likelihood(t, observation))
            .collect()
    }

    /// Log-density of a component (point hypothesis or mixture) at `observation`.
    pub fn component_log_density(
        &self,
        component: &Component,
        observation: Observation,
    ) -> Result<f64, LikelihoodError> {
        match component {
            Component::Hypothesis(t) => self.log_likelihood(*t, observation),
            Component::Mixture(mix) => {
                self.check_mixture(mix)?;
                let logs = self.log_likelihoods(observation)?;
                Ok(mixture_log_density(&logs, mix.weights()))
            }
        }
    }

    fn check_mixture(&self, mix: &MixtureSpec) -> Result<(), LikelihoodError> {
        if mix.weights.len() != self.hypothesis_count() {
            return Err(LikelihoodError::InvalidMixture(format!(
                "mixture has {} weights, model has {} hypotheses",
                mix.weights.len(),
                self.hypothesis_count()
            )));
        }
        Ok(())
    }

    fn check_component(&self, component: &Component) -> Result<(), LikelihoodError> {
        match component {
            Component::Hypothesis(t) => self.check_hypothesis(*t),
            Component::Mixture(mix) => self.check_mixture(mix),
        }
    }

    /// `D_KL[p ‖ q]` in nats.
    ///
    /// Discrete models use the exact finite sum. Gaussian point-vs-point uses
    /// `(m_p - m_q)^2 / 2`; anything involving a Gaussian mixture is integrated
    /// numerically over `[min mean - 10, max mean + 10]`.
    pub fn kl_divergence(&self, p: impl Into<Component>, q: impl Into<Component>) -> Result<f64, LikelihoodError> {
        let (p, q) = (p.into(), q.into());
        self.check_component(&p)?;
        self.check_component(&q)?;
        match self {
            LikelihoodModel::Discrete { .. } => self.kl_exact_sum(&p, &q),
            LikelihoodModel::Gaussian { means } => match (&p, &q) {
                (Component::Hypothesis(a), Component::Hypothesis(b)) => {
                    let d = means[*a] - means[*b];
                    Ok(0.5 * d * d)
                }
                _ => self.kl_quadrature(&p, &q),
            },
        }
    }

    fn kl_exact_sum(&self, p: &Component, q: &Component) -> Result<f64, LikelihoodError> {
        let LikelihoodModel::Discrete { pmf } = self else {
            unreachable!("exact sum is only used for discrete models");
        };
        let mut total = 0.0;
        for j in 0..pmf[0].len() {
            let xi = Observation::Index(j);
            let log_p = self.component_log_density(p, xi)?;
            let p_mass = log_p.exp();
            if p_mass == 0.0 {
                continue;
            }
            total += p_mass * (log_p - self.component_log_density(q, xi)?);
        }
        Ok(total.max(0.0))
    }

    /// Numerical KL for Gaussian components. Exposed so tests can check it
    /// against the closed form.
    pub fn kl_quadrature(&self, p: &Component, q: &Component) -> Result<f64, LikelihoodError> {
        let LikelihoodModel::Gaussian { means } = self else {
            return Err(LikelihoodError::InvalidModel(
                "quadrature KL is defined for the Gaussian family".into(),
            ));
        };
        self.check_component(p)?;
        self.check_component(q)?;
        let lo = means.iter().cloned().fold(f64::INFINITY, f64::min) - GAUSSIAN_TRUNCATION_SIGMAS;
        let hi = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + GAUSSIAN_TRUNCATION_SIGMAS;
        let log_density = |c: &Component, x: f64| -> f64 {
            match c {
                Component::Hypothesis(t) => gaussian_log_pdf(x, means[*t]),
                Component::Mixture(mix) => {
                    let logs: Vec<f64> = means.iter().map(|m| gaussian_log_pdf(x, *m)).collect();
                    mixture_log_density(&logs, mix.weights())
                }
            }
        };
        let integrand = |x: f64| {
            let lp = log_density(p, x);
            let lq = log_density(q, x);
            let mass = lp.exp();
            if mass == 0.0 {
                0.0
            } else {
                mass * (lp - lq)
            }
        };
        match quadrature::integrate(integrand, lo, hi, KL_QUADRATURE_TOLERANCE, MAX_QUADRATURE_INTERVALS) {
            Ok(r) => {
                if r.value < -KL_QUADRATURE_TOLERANCE {
                    return Err(LikelihoodError::NumericalFailure {
                        tolerance: KL_QUADRATURE_TOLERANCE,
                        estimate: r.value,
                        error: r.error,
                    });
                }
                Ok(r.value.max(0.0))
            }
            Err(fail) => Err(LikelihoodError::NumericalFailure {
                tolerance: KL_QUADRATURE_TOLERANCE,
                estimate: fail.estimate,
                error: fail.error,
            }),
        }
    }

    /// The constant `M` bounding `|log L(ξ|θ)/L(ξ|θ')|` over the support and
    /// over all pairs `θ, θ' ≠ excluded`. Zero when fewer than two
    /// hypotheses remain.
    pub fn likelihood_bound(&self, excluded: usize) -> Result<f64, LikelihoodError> {
        self.check_hypothesis(excluded)?;
        let LikelihoodModel::Discrete { pmf } = self else {
            return Err(LikelihoodError::UnboundedLikelihood);
        };
        let rows: Vec<&Vec<f64>> = pmf
            .iter()
            .enumerate()
            .filter(|(t, _)| *t != excluded)
            .map(|(_, r)| r)
            .collect();
        let mut bound: f64 = 0.0;
        for (i, a) in rows.iter().enumerate() {
            for b in &rows[i + 1..] {
                for (pa, pb) in a.iter().zip(b.iter()) {
                    bound = bound.max((pa.ln() - pb.ln()).abs());
                }
            }
        }
        Ok(bound)
    }

    /// Draws one observation from `L(·|θ)`.
    pub fn sample<R: Rng + ?Sized>(&self, hypothesis: usize, rng: &mut R) -> Result<Observation, LikelihoodError> {
        self.check_hypothesis(hypothesis)?;
        Ok(match self {
            LikelihoodModel::Gaussian { means } => {
                let z: f64 = StandardNormal.sample(rng);
                Observation::Real(means[hypothesis] + z)
            }
            LikelihoodModel::Discrete { pmf } => {
                let row = &pmf[hypothesis];
                let u: f64 = rng.random::<f64>();
                let mut cumulative = 0.0;
                let mut chosen = row.len() - 1;
                for (j, p) in row.iter().enumerate() {
                    cumulative += p;
                    if u < cumulative {
                        chosen = j;
                        break;
                    }
                }
                Observation::Index(chosen)
            }
        })
    }
}

fn gaussian_log_pdf(x: f64, mean: f64) -> f64 {
    let d = x - mean;
    -0.5 * d * d - LN_SQRT_2PI
}

fn mixture_log_density(logs: &[f64], weights: &[f64]) -> f64 {
    let terms: Vec<f64> = logs
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(l, w)| l + w.ln())
        .collect();
    log_sum_exp(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

    fn reference_gaussian() -> LikelihoodModel {
        LikelihoodModel::gaussian(vec![0.0, 0.2, 1.0]).unwrap()
    }

    #[test]
    fn density_at_mean() {
        let m = LikelihoodModel::gaussian(vec![0.0, 1.0]).unwrap();
        assert!((m.likelihood(0, Observation::Real(0.0)).unwrap() - INV_SQRT_2PI).abs() < 1e-15);
        assert!((m.likelihood(1, Observation::Real(1.0)).unwrap() - INV_SQRT_2PI).abs() < 1e-15);
    }

    #[test]
    fn discrete_lookup() {
        let m = LikelihoodModel::discrete(vec![vec![0.5, 0.3, 0.2], vec![0.2, 0.3, 0.5]]).unwrap();
        assert!((m.likelihood(0, Observation::Index(2)).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_support() {
        let m = LikelihoodModel::discrete(vec![vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap();
        assert!(matches!(
            m.likelihood(0, Observation::Index(2)),
            Err(LikelihoodError::InvalidObservation { .. })
        ));
        assert!(matches!(
            m.likelihood(0, Observation::Real(0.0)),
            Err(LikelihoodError::InvalidObservation { .. })
        ));
        assert!(matches!(
            reference_gaussian().likelihood(0, Observation::Index(0)),
            Err(LikelihoodError::InvalidObservation { .. })
        ));
    }

    #[test]
    fn rejects_bad_pmf() {
        assert!(LikelihoodModel::discrete(vec![vec![0.5, 0.4], vec![0.5, 0.5]]).is_err());
        assert!(LikelihoodModel::discrete(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).is_err());
        assert!(LikelihoodModel::discrete(vec![vec![0.5, 0.5]]).is_err());
        assert!(LikelihoodModel::gaussian(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn closed_form_gaussian_kl() {
        let m = LikelihoodModel::gaussian(vec![0.0, 0.5, 1.0]).unwrap();
        assert!((m.kl_divergence(0, 2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let m = reference_gaussian();
        for (a, b) in [(0, 1), (0, 2), (2, 1), (1, 1)] {
            let closed = m.kl_divergence(a, b).unwrap();
            let quad = m
                .kl_quadrature(&Component::Hypothesis(a), &Component::Hypothesis(b))
                .unwrap();
            assert!((closed - quad).abs() < 1e-6, "{a},{b}: {closed} vs {quad}");
        }
    }

    // Reference values from an independent adaptive quadrature (scipy.integrate.quad,
    // epsabs 1e-12) of the same integrand.
    #[test]
    fn mixture_kl_reference_values() {
        let m = reference_gaussian();
        let to_mix2 = MixtureSpec::uniform_complement(3, 1).unwrap();
        let to_mix3 = MixtureSpec::uniform_complement(3, 2).unwrap();
        let to_mix1 = MixtureSpec::uniform_complement(3, 0).unwrap();
        assert!((m.kl_divergence(0, to_mix2).unwrap() - 0.111_421_482_184_736).abs() < 1e-6);
        assert!((m.kl_divergence(0, to_mix3).unwrap() - 0.004_975_164_625_450).abs() < 1e-6);
        assert!((m.kl_divergence(0, to_mix1).unwrap() - 0.160_294_000_649_768).abs() < 1e-6);
    }

    #[test]
    fn rate_margins_for_the_gaussian_family() {
        let m = reference_gaussian();
        let margin = |tx: usize| {
            m.kl_divergence(0, tx).unwrap()
                - m.kl_divergence(0, MixtureSpec::uniform_complement(3, tx).unwrap())
                    .unwrap()
        };
        assert!((margin(1) - -0.091).abs() < 1e-3);
        // Reported as 0.494; the integral itself is 0.495025.
        assert!((margin(2) - 0.495_025).abs() < 1e-5);
        assert!((margin(2) - 0.494).abs() < 2e-3);
    }

    #[test]
    fn kl_self_is_zero_and_nonnegative() {
        let d = LikelihoodModel::discrete(vec![vec![0.5, 0.3, 0.2], vec![0.2, 0.3, 0.5]]).unwrap();
        assert_eq!(d.kl_divergence(0, 0).unwrap(), 0.0);
        assert!(d.kl_divergence(0, 1).unwrap() > 0.0);
        let g = reference_gaussian();
        let mix = MixtureSpec::new(1, vec![1.0, 0.0, 0.0]).unwrap();
        // Vertex mixture on hypothesis 0 is L(0) itself.
        assert!(g.kl_divergence(0, mix).unwrap() < KL_QUADRATURE_TOLERANCE);
    }

    #[test]
    fn two_hypothesis_mixture_is_the_other_likelihood() {
        let d = LikelihoodModel::discrete(vec![vec![0.5, 0.3, 0.2], vec![0.2, 0.3, 0.5]]).unwrap();
        let mix = MixtureSpec::uniform_complement(2, 0).unwrap();
        for j in 0..3 {
            let xi = Observation::Index(j);
            let via_mix = d.component_log_density(&Component::Mixture(mix.clone()), xi).unwrap();
            assert_eq!(via_mix, d.log_likelihood(1, xi).unwrap());
        }
    }

    #[test]
    fn bound_examples() {
        let d = LikelihoodModel::discrete(vec![vec![0.5, 0.3, 0.2], vec![0.2, 0.3, 0.5], vec![0.1, 0.1, 0.8]]).unwrap();
        // Brute force over the three support points, both orderings.
        let mut brute: f64 = 0.0;
        for (a, b) in [(0, 1), (1, 0)] {
            for j in 0..3 {
                let r = (d.likelihood(a, Observation::Index(j)).unwrap()
                    / d.likelihood(b, Observation::Index(j)).unwrap())
                .ln();
                brute = brute.max(r);
            }
        }
        let m = d.likelihood_bound(2).unwrap();
        assert!((m - brute).abs() < 1e-15);
        assert!((m - (0.5f64 / 0.2).ln()).abs() < 1e-12);

        let two = LikelihoodModel::discrete(vec![vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap();
        assert_eq!(two.likelihood_bound(0).unwrap(), 0.0);
        assert_eq!(
            reference_gaussian().likelihood_bound(1),
            Err(LikelihoodError::UnboundedLikelihood)
        );
    }

    #[test]
    fn degenerate_row_always_samples_first_point() {
        let d = LikelihoodModel::discrete_unchecked(vec![vec![1.0, 0.0, 0.0], vec![0.2, 0.3, 0.5]]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            assert_eq!(d.sample(0, &mut rng).unwrap(), Observation::Index(0));
        }
    }

    #[test]
    fn gaussian_sample_mean() {
        let g = reference_gaussian();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let Observation::Real(x) = g.sample(0, &mut rng).unwrap() else {
                panic!("gaussian emits reals");
            };
            sum += x;
        }
        assert!((sum / n as f64).abs() < 0.005);
    }

    #[test]
    fn discrete_sample_frequencies() {
        let d = LikelihoodModel::discrete(vec![vec![0.5, 0.3, 0.2], vec![0.2, 0.3, 0.5]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let Observation::Index(j) = d.sample(0, &mut rng).unwrap() else {
                panic!("discrete emits indices");
            };
            counts[j] += 1;
        }
        for (c, p) in counts.iter().zip([0.5, 0.3, 0.2]) {
            assert!((*c as f64 / n as f64 - p).abs() < 0.005);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = reference_gaussian();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..10).map(|_| g.sample(2, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
    }

    #[test]
    fn mixture_validation() {
        assert!(MixtureSpec::new(0, vec![0.1, 0.5, 0.5]).is_err());
        assert!(MixtureSpec::new(0, vec![0.0, 0.5, 0.4]).is_err());
        assert!(MixtureSpec::new(0, vec![0.0, -0.5, 1.5]).is_err());
        assert!(MixtureSpec::new(0, vec![0.0, 0.25, 0.75]).is_ok());
        assert!(HypothesisSet::new(1, 0, 0).is_err());
        assert!(HypothesisSet::new(3, 0, 3).is_err());
    }
}
