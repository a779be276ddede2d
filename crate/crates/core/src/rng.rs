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

//! Randomness for protocol runs.
//!
//! Every random decision in the simulator (key bits, term sampling, Born-rule
//! outcomes) goes through [`Chooser::choose`]. Two implementations exist:
//!
//! * [`RandomSource`] samples, seeded and reproducible.
//! * [`enumerate_branches`] replays a computation once per branch of its
//!   decision tree and reports the exact probability of every leaf.
//!
//! This is what lets the same protocol code produce both Monte Carlo
//! estimates and exact acceptance probabilities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weights at or below this (after normalisation) are treated as impossible.
const ZERO_WEIGHT: f64 = 1e-14;

/// A source of discrete random decisions.
pub trait Chooser {
    /// Picks an index `i` with probability `weights[i] / sum(weights)`.
    ///
    /// Weights must be nonnegative with a positive sum.
    fn choose(&mut self, weights: &[f64]) -> usize;

    /// A uniform bit.
    fn bit(&mut self) -> u8 {
        self.choose(&[0.5, 0.5]) as u8
    }

    /// A uniform index in `0..n`.
    fn uniform(&mut self, n: usize) -> usize {
        self.choose(&vec![1.0; n])
    }

    /// `n` independent uniform bits.
    fn bits(&mut self, n: usize) -> Vec<u8> {
        (0..n).map(|_| self.bit()).collect()
    }
}

impl<C: Chooser + ?Sized> Chooser for &mut C {
    fn choose(&mut self, weights: &[f64]) -> usize {
        (**self).choose(weights)
    }
}

/// Seeded pseudo-random source. The same seed yields the same sequence.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `index` derived from `seed`. Trial `i` of an
    /// estimate uses `substream(seed, i)`, so results do not depend on the
    /// order in which trials execute.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform real in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.gen()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.gen()
    }

    /// Access to the underlying generator for use with `rand` distributions.
    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl Chooser for RandomSource {
    fn choose(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "choose: weights must have a positive sum");
        let mut target = self.rng.gen::<f64>() * total;
        let mut last_possible = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            last_possible = i;
            if target < w {
                return i;
            }
            target -= w;
        }
        // rounding pushed us past the end
        last_possible
    }
}

#[derive(Debug)]
struct Step {
    choice: usize,
    weights: Vec<f64>,
}

/// Chooser that follows a recorded path and extends it with the first
/// possible option whenever it runs past the recorded prefix.
#[derive(Debug)]
pub struct Replay<'a> {
    path: &'a mut Vec<Step>,
    pos: usize,
    probability: f64,
}

impl Replay<'_> {
    /// Probability of the branch followed so far.
    pub fn probability(&self) -> f64 {
        self.probability
    }
}

impl Chooser for Replay<'_> {
    fn choose(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "choose: weights must have a positive sum");
        let normalized: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let choice = if self.pos < self.path.len() {
            self.path[self.pos].choice
        } else {
            let first = normalized
                .iter()
                .position(|&w| w > ZERO_WEIGHT)
                .expect("positive sum implies a possible option");
            self.path.push(Step {
                choice: first,
                weights: normalized.clone(),
            });
            first
        };
        self.probability *= normalized[choice];
        self.pos += 1;
        choice
    }
}

/// Runs `f` once for every branch of its decision tree and returns each
/// leaf's result with its exact probability.
///
/// `f` must be deterministic given the choices it receives. Options with
/// negligible weight are pruned, so the returned probabilities sum to one
/// up to that pruning.
pub fn enumerate_branches<T>(mut f: impl FnMut(&mut Replay<'_>) -> T) -> Vec<(f64, T)> {
    let mut path: Vec<Step> = Vec::new();
    let mut leaves = Vec::new();
    loop {
        let mut replay = Replay {
            path: &mut path,
            pos: 0,
            probability: 1.0,
        };
        let value = f(&mut replay);
        let probability = replay.probability;
        let used = replay.pos;
        debug_assert_eq!(used, path.len(), "branch consumed fewer choices than recorded");
        leaves.push((probability, value));

        // advance to the next branch, odometer style
        loop {
            let Some(step) = path.last_mut() else {
                return leaves;
            };
            let next = step
                .weights
                .iter()
                .enumerate()
                .skip(step.choice + 1)
                .find(|(_, &w)| w > ZERO_WEIGHT)
                .map(|(i, _)| i);
            match next {
                Some(i) => {
                    step.choice = i;
                    break;
                }
                None => {
                    path.pop();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        let xs: Vec<u64> = (0..32).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..32).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn substreams_differ() {
        let mut a = RandomSource::substream(7, 0);
        let mut b = RandomSource::substream(7, 1);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn choose_skips_zero_weights() {
        let mut rng = RandomSource::new(1);
        for _ in 0..1000 {
            let i = rng.choose(&[0.0, 1.0, 0.0, 2.0]);
            assert!(i == 1 || i == 3);
        }
    }

    #[test]
    fn enumeration_covers_tree_with_exact_probabilities() {
        // two coin flips, the second biased when the first is 1
        let leaves = enumerate_branches(|c| {
            let a = c.bit();
            let b = if a == 1 { c.choose(&[1.0, 3.0]) } else { c.choose(&[1.0, 1.0]) };
            (a, b)
        });
        let total: f64 = leaves.iter().map(|(p, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let find = |x: (u8, usize)| leaves.iter().find(|(_, v)| *v == x).unwrap().0;
        assert!((find((0, 0)) - 0.25).abs() < 1e-12);
        assert!((find((1, 1)) - 0.375).abs() < 1e-12);
        assert_eq!(leaves.len(), 4);
    }

    #[test]
    fn enumeration_prunes_impossible_options() {
        let leaves = enumerate_branches(|c| c.choose(&[0.0, 1.0, 0.0]));
        assert_eq!(leaves.len(), 1);
        assert_eq!(leaves[0].1, 1);
    }

    #[test]
    fn enumeration_of_deterministic_function() {
        let leaves = enumerate_branches(|_| 5);
        assert_eq!(leaves, vec![(1.0, 5)]);
    }
}
