// Copyright 2026 The tcverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Acceptance probabilities, view distributions and amplification.
//!
//! Monte Carlo estimates run trial `i` on [`RandomSource::substream`]`(seed, i)`
//! in parallel, so an estimate is a pure function of its configuration and
//! seed. Exact results come from [`enumerate_branches`] over the same
//! protocol code and are limited to `N <= 3`.
//!
//! Confidence intervals use the normal approximation to the binomial,
//! `1.96 * sqrt(p (1 - p) / n)`. It degenerates to zero width at `p = 0`
//! or `p = 1`; use the exact routines for claims near those ends.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::hamiltonian::XZHamiltonian;
use crate::protocol::{all_pairs, ProtocolRunner, ProverStrategy, Variant, ZkSimulator, ZkView};
use crate::rng::{enumerate_branches, RandomSource, Replay};

/// Largest `N` handled by exact enumeration.
pub const EXACT_CAP: usize = 3;

const Z95: f64 = 1.96;
const SOUNDNESS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub trials: u64,
    pub ci95_halfwidth: f64,
    pub seed: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let mean = successes as f64 / trials as f64;
        Self {
            mean,
            trials,
            ci95_halfwidth: Z95 * (mean * (1.0 - mean) / trials as f64).sqrt(),
            seed,
        }
    }

    pub fn std_error(&self) -> f64 {
        (self.mean * (1.0 - self.mean) / self.trials as f64).sqrt()
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.ci95_halfwidth
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.ci95_halfwidth
    }
}

/// Estimates `P[trial returns true]` over `trials` seeded, independent runs.
pub fn estimate_with<F>(trials: u64, seed: u64, trial: F) -> Result<Estimate>
where
    F: Fn(&mut RandomSource) -> Result<bool> + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let successes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomSource::substream(seed, i);
            trial(&mut rng).map(u64::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Estimate::from_counts(successes, trials, seed))
}

/// Monte Carlo acceptance probability of `variant` with `strategy`.
pub fn estimate_pacc(
    variant: Variant,
    ham: &XZHamiltonian,
    strategy: &ProverStrategy,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    let runner = ProtocolRunner::new(variant, ham, strategy)?;
    estimate_runner(&runner, trials, seed)
}

pub fn estimate_runner(runner: &ProtocolRunner<'_>, trials: u64, seed: u64) -> Result<Estimate> {
    estimate_with(trials, seed, |rng| Ok(runner.run_trial(rng)?.verdict.is_accept()))
}

fn check_exact_cap(ham: &XZHamiltonian) -> Result<()> {
    if ham.n_qubits > EXACT_CAP {
        return Err(Error::CapExceeded {
            what: "exact enumeration",
            n: ham.n_qubits,
            cap: EXACT_CAP,
        });
    }
    Ok(())
}

/// Exact law of `f` over every branch of its decision tree.
pub fn exact_distribution<T, F>(f: F) -> Result<DiscreteDistribution<T>>
where
    T: Ord + Clone,
    F: FnMut(&mut Replay<'_>) -> Result<T>,
{
    let mut law = BTreeMap::new();
    for (p, value) in enumerate_branches(f) {
        *law.entry(value?).or_insert(0.0) += p;
    }
    Ok(DiscreteDistribution { law })
}

/// Exact acceptance probability by enumerating keys, measurement branches
/// and check pairs with their analytic probabilities.
pub fn exact_pacc(variant: Variant, ham: &XZHamiltonian, strategy: &ProverStrategy) -> Result<f64> {
    check_exact_cap(ham)?;
    let runner = ProtocolRunner::new(variant, ham, strategy)?;
    exact_pacc_runner(&runner)
}

pub fn exact_pacc_runner(runner: &ProtocolRunner<'_>) -> Result<f64> {
    check_exact_cap(runner.hamiltonian())?;
    let law = exact_distribution(|c| Ok(runner.run_trial(c)?.verdict.is_accept()))?;
    Ok(law.probability(&true))
}

/// Probability law over a finite set of outcomes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscreteDistribution<T: Ord> {
    law: BTreeMap<T, f64>,
}

impl<T: Ord + Clone> DiscreteDistribution<T> {
    /// Accumulates `(probability, outcome)` pairs; repeated outcomes add up.
    pub fn from_weighted(items: impl IntoIterator<Item = (f64, T)>) -> Self {
        let mut law = BTreeMap::new();
        for (p, t) in items {
            *law.entry(t).or_insert(0.0) += p;
        }
        Self { law }
    }

    /// Empirical frequencies.
    pub fn from_samples(samples: impl IntoIterator<Item = T>) -> Self {
        let mut counts: BTreeMap<T, u64> = BTreeMap::new();
        let mut total = 0u64;
        for s in samples {
            *counts.entry(s).or_insert(0) += 1;
            total += 1;
        }
        let law = counts
            .into_iter()
            .map(|(k, c)| (k, c as f64 / total as f64))
            .collect();
        Self { law }
    }

    pub fn probability(&self, outcome: &T) -> f64 {
        self.law.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&T, f64)> {
        self.law.iter().map(|(k, &p)| (k, p))
    }

    pub fn len(&self) -> usize {
        self.law.len()
    }

    pub fn is_empty(&self) -> bool {
        self.law.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.law.values().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.law.values().find(|&&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid probability {p}")));
        }
        let total = self.total();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn marginal<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> DiscreteDistribution<U> {
        DiscreteDistribution::from_weighted(self.law.iter().map(|(k, &p)| (p, f(k))))
    }
}

/// Total variation distance `½ Σ |p - q|` over the union of supports.
pub fn tvd<T: Ord + Clone>(p: &DiscreteDistribution<T>, q: &DiscreteDistribution<T>) -> Result<f64> {
    p.validate()?;
    q.validate()?;
    let mut sum = 0.0;
    for (k, pk) in &p.law {
        sum += (pk - q.probability(k)).abs();
    }
    for (k, qk) in &q.law {
        if !p.law.contains_key(k) {
            sum += qk;
        }
    }
    Ok((sum / 2.0).min(1.0))
}

/// Noise floor for the TVD between two independent `trials`-sample
/// empirical laws of the same distribution: three times `½ Σ sd_k`, where
/// `sd_k = sqrt(2 p_k (1 - p_k) / trials)` uses the pooled frequency `p_k`.
pub fn sampled_tvd_threshold<T: Ord + Clone>(
    p: &DiscreteDistribution<T>,
    q: &DiscreteDistribution<T>,
    trials: u64,
) -> f64 {
    let n = trials.max(1) as f64;
    let mut keys: BTreeSet<&T> = p.law.keys().collect();
    keys.extend(q.law.keys());
    let sum: f64 = keys
        .into_iter()
        .map(|k| {
            let pk = (p.probability(k) + q.probability(k)) / 2.0;
            (2.0 * pk * (1.0 - pk) / n).sqrt()
        })
        .sum();
    3.0 * sum / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViewSource {
    /// The honest prover's run of the Bell-pair zero-knowledge variant.
    VirtualZkHonest,
    Simulator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewMode {
    Exact,
    Sampled { trials: u64, seed: u64 },
}

/// Law of the verifier's `(h, a, b, m_a, m_b, x, z)` view.
pub fn view_distribution(
    source: ViewSource,
    ham: &XZHamiltonian,
    mode: ViewMode,
) -> Result<DiscreteDistribution<ZkView>> {
    let sim = ZkSimulator::new(ham)?;
    let runner = ProtocolRunner::with_ground_state(Variant::VirtualZk, ham, &ProverStrategy::Honest, sim.ground())?;
    match mode {
        ViewMode::Exact => {
            check_exact_cap(ham)?;
            match source {
                ViewSource::Simulator => exact_distribution(|c| sim.sample(c)),
                ViewSource::VirtualZkHonest => exact_distribution(|c| {
                    Ok(runner.run_trial(c)?.zk_view().expect("virtual-zk records carry a view"))
                }),
            }
        }
        ViewMode::Sampled { trials, seed } => {
            if trials == 0 {
                return Err(Error::InvalidArgument("trials must be >= 1".into()));
            }
            let samples: Result<Vec<ZkView>> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let mut rng = RandomSource::substream(seed, i);
                    match source {
                        ViewSource::Simulator => sim.sample(&mut rng),
                        ViewSource::VirtualZkHonest => {
                            Ok(runner.run_trial(&mut rng)?.zk_view().expect("virtual-zk records carry a view"))
                        }
                    }
                })
                .collect();
            Ok(DiscreteDistribution::from_samples(samples?))
        }
    }
}

/// Highest acceptance probability any prover can reach in `variant`:
/// `1 - λ_min`, or `1 - λ_min / C(N, 2)` for the zero-knowledge variants.
pub fn acceptance_ceiling(variant: Variant, n_qubits: usize, lambda_min: f64) -> f64 {
    if variant.is_zk() {
        1.0 - lambda_min / all_pairs(n_qubits).len() as f64
    } else {
        1.0 - lambda_min
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub strategy: String,
    pub estimate: Estimate,
    /// Lower 95% bound exceeds the ceiling.
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub variant: Variant,
    pub lambda_min: f64,
    pub ceiling: f64,
    pub rows: Vec<SweepRow>,
    pub max_mean: f64,
    pub max_lower: f64,
    pub any_flagged: bool,
}

/// Estimates every strategy in `family` and flags any whose lower 95%
/// bound exceeds the acceptance ceiling set by the ground energy.
pub fn adversary_sweep(
    variant: Variant,
    ham: &XZHamiltonian,
    family: &[ProverStrategy],
    trials: u64,
    seed: u64,
) -> Result<SweepReport> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("adversary family is empty".into()));
    }
    let ground = ham.ground_state()?;
    let ceiling = acceptance_ceiling(variant, ham.n_qubits, ground.lambda_min);
    let mut rows = Vec::with_capacity(family.len());
    for (k, strategy) in family.iter().enumerate() {
        let runner = ProtocolRunner::with_ground_state(variant, ham, strategy, &ground)?;
        let strategy_seed = RandomSource::substream(seed, (1 << 32) | k as u64).next_u64();
        let estimate = estimate_runner(&runner, trials, strategy_seed)?;
        rows.push(SweepRow {
            strategy: strategy.label(),
            flagged: estimate.lower() > ceiling + SOUNDNESS_SLACK,
            estimate,
        });
    }
    let max_mean = rows.iter().map(|r| r.estimate.mean).fold(f64::NEG_INFINITY, f64::max);
    let max_lower = rows.iter().map(|r| r.estimate.lower()).fold(f64::NEG_INFINITY, f64::max);
    let any_flagged = rows.iter().any(|r| r.flagged);
    Ok(SweepReport {
        variant,
        lambda_min: ground.lambda_min,
        ceiling,
        rows,
        max_mean,
        max_lower,
        any_flagged,
    })
}

/// A standard adversary family for `n` qubits: the honest prover, every
/// nonzero byproduct flip of a single qubit, constant answers, and
/// `random_states` Haar-random submitted states.
pub fn standard_family(n: usize, random_states: usize, rng: &mut RandomSource) -> Vec<ProverStrategy> {
    use crate::protocol::ProverAnswer;
    use crate::quantum::StateVector;

    let mut family = vec![ProverStrategy::Honest];
    for q in 0..n {
        for (fx, fz) in [(1, 0), (0, 1), (1, 1)] {
            let mut x_mask = vec![0; n];
            let mut z_mask = vec![0; n];
            x_mask[q] = fx;
            z_mask[q] = fz;
            family.push(ProverStrategy::ByproductFlip { x_mask, z_mask });
        }
    }
    family.push(ProverStrategy::Constant(ProverAnswer::zeros(n)));
    family.push(ProverStrategy::Constant(ProverAnswer { x: vec![1; n], z: vec![0; n] }));
    family.push(ProverStrategy::Constant(ProverAnswer { x: rng_bits(rng, n), z: rng_bits(rng, n) }));
    for _ in 0..random_states {
        family.push(ProverStrategy::HonestWithState(StateVector::random(n, rng)));
    }
    family
}

fn rng_bits(rng: &mut RandomSource, n: usize) -> Vec<u8> {
    use crate::rng::Chooser;
    rng.bits(n)
}

/// `k` independent runs of the main protocol with fresh keys; accepts iff
/// the fraction of accepting runs is at least `threshold`.
pub fn parallel_repetition(
    ham: &XZHamiltonian,
    strategy: &ProverStrategy,
    k: usize,
    threshold: f64,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    let runner = ProtocolRunner::new(Variant::Main, ham, strategy)?;
    parallel_repetition_runner(&runner, k, threshold, trials, seed)
}

pub fn parallel_repetition_runner(
    runner: &ProtocolRunner<'_>,
    k: usize,
    threshold: f64,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!("threshold {threshold} must lie in (0, 1)")));
    }
    let needed = min_accepts(k, threshold);
    estimate_with(trials, seed, |rng| {
        let mut accepted = 0;
        for _ in 0..k {
            if runner.run_trial(rng)?.verdict.is_accept() {
                accepted += 1;
            }
        }
        Ok(accepted >= needed)
    })
}

/// Smallest accept count `c` with `c / k >= threshold`.
pub fn min_accepts(k: usize, threshold: f64) -> usize {
    (threshold * k as f64 - 1e-9).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `observed` counts to `expected` probabilities.
/// Cells with zero expected probability are dropped from the statistic;
/// a nonzero count in such a cell yields `p_value = 0`.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<ChiSquare> {
    if observed.len() != expected.len() {
        return Err(Error::SizeMismatch {
            expected: expected.len(),
            found: observed.len(),
        });
    }
    let total: u64 = observed.iter().sum();
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&o, &e) in observed.iter().zip(expected) {
        if e <= 1e-12 {
            if o > 0 {
                return Ok(ChiSquare { statistic: f64::INFINITY, dof: 0, p_value: 0.0 });
            }
            continue;
        }
        let exp = e * total as f64;
        statistic += (o as f64 - exp).powi(2) / exp;
        cells += 1;
    }
    let dof = cells.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        1.0 - dist.cdf(statistic)
    };
    Ok(ChiSquare { statistic, dof, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_ci_formula() {
        let e = Estimate::from_counts(750, 1000, 1);
        assert!((e.mean - 0.75).abs() < 1e-15);
        assert!((e.ci95_halfwidth - 1.96 * (0.75f64 * 0.25 / 1000.0).sqrt()).abs() < 1e-12);
        let full = Estimate::from_counts(10, 10, 1);
        assert_eq!(full.ci95_halfwidth, 0.0);
    }

    #[test]
    fn tvd_examples() {
        let p = DiscreteDistribution::from_weighted([(0.5, 0), (0.5, 1)]);
        assert_eq!(tvd(&p, &p).unwrap(), 0.0);
        let q = DiscreteDistribution::from_weighted([(1.0, 0)]);
        assert!((tvd(&p, &q).unwrap() - 0.5).abs() < 1e-15);
        let r = DiscreteDistribution::from_weighted([(1.0, 7)]);
        assert!((tvd(&q, &r).unwrap() - 1.0).abs() < 1e-15);
        let bad = DiscreteDistribution::from_weighted([(0.7, 0)]);
        assert!(tvd(&p, &bad).is_err());
    }

    #[test]
    fn min_accepts_boundaries() {
        assert_eq!(min_accepts(50, 0.6), 30);
        assert_eq!(min_accepts(1, 0.5), 1);
        assert_eq!(min_accepts(10, 0.55), 6);
    }

    #[test]
    fn repetition_argument_checks() {
        let ham = XZHamiltonian::bell(-1);
        let s = ProverStrategy::Honest;
        assert!(parallel_repetition(&ham, &s, 0, 0.5, 10, 1).is_err());
        assert!(parallel_repetition(&ham, &s, 3, 1.0, 10, 1).is_err());
        assert!(parallel_repetition(&ham, &s, 3, 0.0, 10, 1).is_err());
        let e = parallel_repetition(&ham, &s, 1, 0.5, 200, 1).unwrap();
        assert_eq!(e.mean, 1.0);
    }

    #[test]
    fn chi_square_sanity() {
        let fit = chi_square_gof(&[25, 25, 25, 25], &[0.25; 4]).unwrap();
        assert_eq!(fit.statistic, 0.0);
        assert!((fit.p_value - 1.0).abs() < 1e-12);
        let off = chi_square_gof(&[100, 0, 0, 0], &[0.25; 4]).unwrap();
        assert!(off.p_value < 1e-10);
        let impossible = chi_square_gof(&[1, 9], &[0.0, 1.0]).unwrap();
        assert_eq!(impossible.p_value, 0.0);
    }

    #[test]
    fn empty_family_is_an_error() {
        let ham = XZHamiltonian::bell(-1);
        assert!(adversary_sweep(Variant::Main, &ham, &[], 10, 1).is_err());
    }
}
