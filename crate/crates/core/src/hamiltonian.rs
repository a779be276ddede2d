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

//! 2-local XZ Hamiltonians
//!
//! `H = Σ_{i<j} (p_ij / 2) [ (I + s_ij X_i X_j)/2 + (I + s_ij Z_i Z_j)/2 ]`
//! with `p_ij > 0`, `Σ p_ij = 1` and `s_ij = ±1`. Each term is an average of
//! two projectors, so the spectrum lies in `[0, 1]`, and a prover whose
//! submitted state is `ρ` passes the two-qubit parity check with probability
//! `1 - Tr(ρ H)`.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::StateVector;
use crate::rng::{Chooser, RandomSource};

/// Largest `N` for which dense matrices are built by default.
pub const DEFAULT_DENSE_CAP: usize = 12;

const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XZTerm {
    pub i: usize,
    pub j: usize,
    pub p: f64,
    pub s: i8,
}

impl XZTerm {
    pub fn new(i: usize, j: usize, p: f64, s: i8) -> Self {
        Self { i, j, p, s }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromiseLabel {
    Yes,
    No,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XZHamiltonian {
    pub n_qubits: usize,
    pub terms: Vec<XZTerm>,
    /// Yes-instance bound: ground energy below `alpha`.
    pub alpha: Option<f64>,
    /// No-instance bound: ground energy above `beta`.
    pub beta: Option<f64>,
    pub promise: PromiseLabel,
}

/// One violated instance invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    TooFewQubits(usize),
    NoTerms,
    IndicesNotOrdered { term: usize, i: usize, j: usize },
    IndexOutOfRange { term: usize, index: usize, n_qubits: usize },
    NonPositiveWeight { term: usize, p: f64 },
    BadSign { term: usize, s: i64 },
    DuplicatePair { term: usize, i: usize, j: usize },
    WeightSum(f64),
    PromiseOrder { alpha: f64, beta: f64 },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            TooFewQubits(n) => write!(f, "N = {n}: need at least 2 qubits"),
            NoTerms => write!(f, "no terms"),
            IndicesNotOrdered { term, i, j } => {
                write!(f, "term {term}: indices not strictly ordered (i = {i}, j = {j})")
            }
            IndexOutOfRange { term, index, n_qubits } => {
                write!(f, "term {term}: index {index} outside 1..={n_qubits}")
            }
            NonPositiveWeight { term, p } => write!(f, "term {term}: weight {p} must be > 0"),
            BadSign { term, s } => write!(f, "term {term}: sign must be ±1, got {s}"),
            DuplicatePair { term, i, j } => write!(f, "term {term}: duplicate pair ({i}, {j})"),
            WeightSum(sum) => write!(f, "weights sum ≠ 1 (sum = {sum})"),
            PromiseOrder { alpha, beta } => {
                write!(f, "promise thresholds need alpha < beta (alpha = {alpha}, beta = {beta})")
            }
        }
    }
}

/// Energy of a state and the acceptance probability it predicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy: f64,
    pub p_acc_predicted: f64,
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: StateVector,
    pub lambda_min: f64,
}

impl XZHamiltonian {
    /// Builds and validates an instance without promise data.
    pub fn new(n_qubits: usize, terms: Vec<XZTerm>) -> Result<Self> {
        let ham = Self {
            n_qubits,
            terms,
            alpha: None,
            beta: None,
            promise: PromiseLabel::Unknown,
        };
        ham.check()?;
        Ok(ham)
    }

    pub fn with_promise(mut self, alpha: f64, beta: f64, promise: PromiseLabel) -> Result<Self> {
        self.alpha = Some(alpha);
        self.beta = Some(beta);
        self.promise = promise;
        self.check()?;
        Ok(self)
    }

    /// The single-term instance on two qubits with sign `s`. For `s = -1` its
    /// unique ground state is `|Φ+⟩` with energy 0.
    pub fn bell(s: i8) -> Self {
        Self::new(2, vec![XZTerm::new(1, 2, 1.0, s)]).expect("bell preset is valid")
    }

    /// Random valid instance: a random nonempty subset of pairs, weights
    /// drawn uniformly then normalised, uniform signs.
    pub fn random(n_qubits: usize, rng: &mut RandomSource) -> Self {
        assert!(n_qubits >= 2);
        let pairs: Vec<(usize, usize)> = (1..=n_qubits)
            .flat_map(|i| (i + 1..=n_qubits).map(move |j| (i, j)))
            .collect();
        let mut chosen: Vec<(usize, usize)> = pairs.iter().copied().filter(|_| rng.bit() == 1).collect();
        if chosen.is_empty() {
            chosen.push(pairs[rng.uniform(pairs.len())]);
        }
        let raw: Vec<f64> = chosen.iter().map(|_| 0.05 + rng.unit()).collect();
        let total: f64 = raw.iter().sum();
        let terms = chosen
            .iter()
            .zip(&raw)
            .map(|(&(i, j), w)| XZTerm::new(i, j, w / total, if rng.bit() == 1 { 1 } else { -1 }))
            .collect();
        Self::new(n_qubits, terms).expect("random instance is valid by construction")
    }

    /// Every violated invariant, empty iff the instance is valid.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        if self.n_qubits < 2 {
            issues.push(ValidationIssue::TooFewQubits(self.n_qubits));
        }
        if self.terms.is_empty() {
            issues.push(ValidationIssue::NoTerms);
        }
        let mut seen = Vec::new();
        for (k, t) in self.terms.iter().enumerate() {
            let term = k + 1;
            if t.i >= t.j {
                issues.push(ValidationIssue::IndicesNotOrdered { term, i: t.i, j: t.j });
            }
            for index in [t.i, t.j] {
                if index == 0 || index > self.n_qubits {
                    issues.push(ValidationIssue::IndexOutOfRange {
                        term,
                        index,
                        n_qubits: self.n_qubits,
                    });
                }
            }
            if !(t.p > 0.0) {
                issues.push(ValidationIssue::NonPositiveWeight { term, p: t.p });
            }
            if t.s != 1 && t.s != -1 {
                issues.push(ValidationIssue::BadSign { term, s: t.s.into() });
            }
            if seen.contains(&(t.i, t.j)) {
                issues.push(ValidationIssue::DuplicatePair { term, i: t.i, j: t.j });
            }
            seen.push((t.i, t.j));
        }
        let sum: f64 = self.terms.iter().map(|t| t.p).sum();
        if !self.terms.is_empty() && (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            issues.push(ValidationIssue::WeightSum(sum));
        }
        if let (Some(alpha), Some(beta)) = (self.alpha, self.beta) {
            if !(alpha < beta) {
                issues.push(ValidationIssue::PromiseOrder { alpha, beta });
            }
        }
        issues
    }

    pub fn check(&self) -> Result<()> {
        let issues = self.validate();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(issues))
        }
    }

    /// Draws term `(i, j)` with probability `p_ij`.
    pub fn sample_term(&self, rng: &mut impl Chooser) -> (usize, usize) {
        let weights: Vec<f64> = self.terms.iter().map(|t| t.p).collect();
        let t = &self.terms[rng.choose(&weights)];
        (t.i, t.j)
    }

    pub fn term(&self, i: usize, j: usize) -> Option<&XZTerm> {
        self.terms.iter().find(|t| t.i == i && t.j == j)
    }

    /// Exact `⟨ψ|H|ψ⟩` from per-term Pauli expectations.
    pub fn energy(&self, state: &StateVector) -> Result<EnergyReport> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                expected: self.n_qubits,
                found: state.n_qubits(),
            });
        }
        let n = self.n_qubits;
        let amps = state.amplitudes();
        let energy = self
            .terms
            .iter()
            .map(|t| {
                let mi = 1 << (n - t.i);
                let mj = 1 << (n - t.j);
                let mut zz = 0.0;
                let mut xx = Complex64::new(0.0, 0.0);
                for (k, a) in amps.iter().enumerate() {
                    let parity = ((k & mi != 0) as u8) ^ ((k & mj != 0) as u8);
                    zz += if parity == 0 { a.norm_sqr() } else { -a.norm_sqr() };
                    xx += a.conj() * amps[k ^ mi ^ mj];
                }
                let s = f64::from(t.s);
                t.p / 2.0 * ((1.0 + s * xx.re) / 2.0 + (1.0 + s * zz) / 2.0)
            })
            .sum::<f64>();
        Ok(EnergyReport {
            energy,
            p_acc_predicted: 1.0 - energy,
        })
    }

    fn check_cap(&self, what: &'static str, cap: usize) -> Result<()> {
        if self.n_qubits > cap {
            return Err(Error::CapExceeded {
                what,
                n: self.n_qubits,
                cap,
            });
        }
        Ok(())
    }

    /// Dense `2^N × 2^N` matrix of `H`. It is real symmetric since `XX` and
    /// `ZZ` are real.
    pub fn build_dense(&self) -> Result<DMatrix<f64>> {
        self.build_dense_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn build_dense_with_cap(&self, cap: usize) -> Result<DMatrix<f64>> {
        self.check_cap("dense Hamiltonian", cap)?;
        let n = self.n_qubits;
        let dim = 1usize << n;
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for t in &self.terms {
            let mi = 1 << (n - t.i);
            let mj = 1 << (n - t.j);
            let s = f64::from(t.s);
            let w = t.p / 2.0;
            for k in 0..dim {
                let parity = ((k & mi != 0) as u8) ^ ((k & mj != 0) as u8);
                let zz = if parity == 0 { 1.0 } else { -1.0 };
                // (I + s XX)/2 + (I + s ZZ)/2
                m[(k, k)] += w * (1.0 + s * zz / 2.0);
                m[(k, k ^ mi ^ mj)] += w * s / 2.0;
            }
        }
        Ok(m)
    }

    /// Minimal eigenpair by dense symmetric diagonalisation. With a
    /// degenerate ground space any minimiser may be returned; the choice is
    /// deterministic for a given instance.
    pub fn ground_state(&self) -> Result<GroundState> {
        self.ground_state_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn ground_state_with_cap(&self, cap: usize) -> Result<GroundState> {
        self.check_cap("ground state", cap)?;
        let eig = SymmetricEigen::new(self.build_dense_with_cap(cap)?);
        let (idx, &lambda_min) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty spectrum");
        let amplitudes = eig
            .eigenvectors
            .column(idx)
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        let state = StateVector::normalized(amplitudes)?.canonical_phase();
        Ok(GroundState { state, lambda_min })
    }

    /// All eigenvalues in ascending order.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let mut vals: Vec<f64> = SymmetricEigen::new(self.build_dense()?)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    /// Default amplification threshold `1 - (alpha + beta)/2`, midway between
    /// the soundness and completeness acceptance levels.
    pub fn midpoint_threshold(&self) -> Option<f64> {
        Some(1.0 - (self.alpha? + self.beta?) / 2.0)
    }
}
