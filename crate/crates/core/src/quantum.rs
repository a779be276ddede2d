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

//! Exact pure-state simulation.
//!
//! Qubits are numbered from 1. In an `n`-qubit register, qubit 1 is the most
//! significant bit of the amplitude index and qubit `n` the least significant:
//! the amplitude of `|b_1 b_2 ... b_n⟩` sits at index `b_1 2^(n-1) + ... + b_n`.
//! All indexing below derives from [`StateVector::mask`].

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{Chooser, RandomSource};

/// Tolerance for exact-arithmetic checks.
pub const TOLERANCE: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    H,
    X,
    Z,
    /// Control first, target second.
    Cnot,
}

impl Gate {
    fn arity(self) -> usize {
        match self {
            Gate::Cnot => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::Z => "Z",
            Gate::Cnot => "CNOT",
        }
    }
}

/// Pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state with the given amplitude index.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!(n_qubits >= 1, "a register needs at least one qubit");
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = ONE;
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// Computational basis state `|bits[0] bits[1] ...⟩`.
    pub fn from_bits(bits: &[u8]) -> Self {
        let index = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        Self::basis(bits.len(), index)
    }

    /// Checks that the length is a power of two and the norm is one.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::SizeMismatch {
                expected: len.next_power_of_two().max(2),
                found: len,
            });
        }
        let state = Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Self::from_amplitudes(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Gaussian-random (Haar-distributed) pure state.
    pub fn random(n_qubits: usize, rng: &mut RandomSource) -> Self {
        let amplitudes: Vec<Complex64> = (0..1usize << n_qubits)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng.rng_mut());
                let im: f64 = StandardNormal.sample(rng.rng_mut());
                Complex64::new(re, im)
            })
            .collect();
        Self::normalized(amplitudes).expect("gaussian vector is nonzero")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`, the phase-insensitive equality metric.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        if self.n_qubits != other.n_qubits {
            return 0.0;
        }
        self.inner(other).norm_sqr()
    }

    /// `self ⊗ other`; the qubits of `other` are appended after those of `self`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        }
    }

    /// Bit mask of qubit `q` in the amplitude index.
    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - q)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn check_distinct(&self, qubits: &[usize]) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..k].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Applies `gate` to `targets` (for CNOT: control, target).
    pub fn apply_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(Error::GateArity {
                gate: gate.name(),
                expected: gate.arity(),
                found: targets.len(),
            });
        }
        self.check_distinct(targets)?;
        match gate {
            Gate::H => self.h(targets[0]),
            Gate::X => self.x(targets[0]),
            Gate::Z => self.z(targets[0]),
            Gate::Cnot => self.cnot(targets[0], targets[1]),
        }
        Ok(())
    }

    pub(crate) fn h(&mut self, q: usize) {
        let mask = self.mask(q);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let a = self.amplitudes[i];
                let b = self.amplitudes[i | mask];
                self.amplitudes[i] = (a + b) * FRAC_1_SQRT_2;
                self.amplitudes[i | mask] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    pub(crate) fn x(&mut self, q: usize) {
        let mask = self.mask(q);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                self.amplitudes.swap(i, i | mask);
            }
        }
    }

    pub(crate) fn z(&mut self, q: usize) {
        let mask = self.mask(q);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask != 0 {
                *a = -*a;
            }
        }
    }

    pub(crate) fn cnot(&mut self, control: usize, target: usize) {
        let c = self.mask(control);
        let t = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & c != 0 && i & t == 0 {
                self.amplitudes.swap(i, i | t);
            }
        }
    }

    /// Applies `X^x_j Z^z_j` to every qubit `j` (Z first, then X).
    pub fn apply_pauli_pad(&mut self, x: &[u8], z: &[u8]) {
        for (j, (&xj, &zj)) in x.iter().zip(z).enumerate() {
            if zj == 1 {
                self.z(j + 1);
            }
            if xj == 1 {
                self.x(j + 1);
            }
        }
    }

    /// Probabilities of every joint computational-basis outcome on `qubits`.
    /// Outcome patterns are indexed with the first listed qubit as the most
    /// significant bit.
    fn outcome_probabilities(&self, qubits: &[usize]) -> Vec<f64> {
        let masks: Vec<usize> = qubits.iter().map(|&q| self.mask(q)).collect();
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            probs[self.pattern(i, &masks)] += a.norm_sqr();
        }
        probs
    }

    fn pattern(&self, index: usize, masks: &[usize]) -> usize {
        masks
            .iter()
            .fold(0, |acc, &m| (acc << 1) | usize::from(index & m != 0))
    }

    /// Projects `qubits` onto `pattern` and renormalises.
    fn collapse(&mut self, qubits: &[usize], pattern: usize, probability: f64) {
        let masks: Vec<usize> = qubits.iter().map(|&q| self.mask(q)).collect();
        let scale = 1.0 / probability.sqrt();
        for i in 0..self.amplitudes.len() {
            if self.pattern(i, &masks) == pattern {
                self.amplitudes[i] *= scale;
            } else {
                self.amplitudes[i] = ZERO;
            }
        }
    }

    /// Measures qubit `q` in the computational basis (`basis = 0`) or the
    /// Hadamard basis (`basis = 1`). The state is left in the post-measurement
    /// state `H^basis |outcome⟩` on `q`.
    pub fn measure_qubit(&mut self, q: usize, basis: u8, rng: &mut impl Chooser) -> Result<u8> {
        self.check_qubit(q)?;
        if basis == 1 {
            self.h(q);
        }
        let probs = self.outcome_probabilities(&[q]);
        let outcome = rng.choose(&probs);
        self.collapse(&[q], outcome, probs[outcome]);
        if basis == 1 {
            self.h(q);
        }
        Ok(outcome as u8)
    }

    /// Bell measurement of `(qa, qb)`, returning the byproduct `(x, z)`.
    ///
    /// Convention: if `qa` holds `|ψ⟩` and `(qb, qc)` holds `(|00⟩+|11⟩)/√2`,
    /// then after the measurement `qc` holds `X^x Z^z |ψ⟩`, so applying
    /// `X^x` then `Z^z` restores `|ψ⟩`. The outcome `(0, 0)` is `|Φ+⟩`.
    /// The measured pair is left in the Bell state matching the outcome.
    pub fn bell_measure(&mut self, qa: usize, qb: usize, rng: &mut impl Chooser) -> Result<(u8, u8)> {
        self.check_distinct(&[qa, qb])?;
        self.cnot(qa, qb);
        self.h(qa);
        let probs = self.outcome_probabilities(&[qa, qb]);
        let outcome = rng.choose(&probs);
        self.collapse(&[qa, qb], outcome, probs[outcome]);
        self.h(qa);
        self.cnot(qa, qb);
        let z = (outcome >> 1) as u8;
        let x = (outcome & 1) as u8;
        Ok((x, z))
    }

    /// Reduced density matrix on qubits `a < b`, tracing out all others.
    /// Row/column index is `2 * bit_a + bit_b`.
    pub fn reduced_density(&self, a: usize, b: usize) -> Result<DensityMatrix2Q> {
        self.check_distinct(&[a, b])?;
        if a > b {
            return Err(Error::InvalidArgument(format!(
                "reduced_density expects a < b, got ({a}, {b})"
            )));
        }
        let ma = self.mask(a);
        let mb = self.mask(b);
        let both = ma | mb;
        let mut rho = [[ZERO; 4]; 4];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let row = self.pattern(i, &[ma, mb]);
            let rest = i & !both;
            for col in 0..4 {
                let j = rest | if col & 2 != 0 { ma } else { 0 } | if col & 1 != 0 { mb } else { 0 };
                rho[row][col] += amp * self.amplitudes[j].conj();
            }
        }
        Ok(DensityMatrix2Q { entries: rho })
    }

    /// Probability of each computational-basis outcome of the whole register
    /// after rotating every qubit into basis `h`.
    pub fn basis_distribution(&self, h: u8) -> Vec<f64> {
        let mut rotated = self.clone();
        if h == 1 {
            for q in 1..=self.n_qubits {
                rotated.h(q);
            }
        }
        rotated.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Sign-fixes the global phase: the largest-magnitude amplitude becomes
    /// real and positive.
    pub fn canonical_phase(mut self) -> Self {
        let pivot = self
            .amplitudes
            .iter()
            .copied()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .unwrap_or(ONE);
        let phase = pivot.conj() / pivot.norm();
        for a in &mut self.amplitudes {
            *a *= phase;
        }
        self
    }
}

/// `⊗_j H^h |m_j⟩`.
pub fn prepare_bb84(h: u8, m: &[u8]) -> StateVector {
    let mut state = StateVector::from_bits(m);
    if h == 1 {
        for q in 1..=m.len() {
            state.h(q);
        }
    }
    state
}

/// `k` Bell pairs `(|00⟩+|11⟩)/√2` on `2k` qubits; pair `j` occupies qubits
/// `(2j-1, 2j)`.
pub fn make_bell_pairs(k: usize) -> StateVector {
    assert!(k >= 1, "need at least one Bell pair");
    let mut state = StateVector::zero(2 * k);
    for j in 1..=k {
        state.h(2 * j - 1);
        state.cnot(2 * j - 1, 2 * j);
    }
    state
}

/// Two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix2Q {
    pub entries: [[Complex64; 4]; 4],
}

impl DensityMatrix2Q {
    pub fn pure(state: &StateVector) -> Result<Self> {
        if state.n_qubits() != 2 {
            return Err(Error::SizeMismatch {
                expected: 2,
                found: state.n_qubits(),
            });
        }
        let a = state.amplitudes();
        let mut entries = [[ZERO; 4]; 4];
        for (r, row) in entries.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = a[r] * a[c].conj();
            }
        }
        Ok(Self { entries })
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..4).all(|r| (0..4).all(|c| (self.entries[r][c] - self.entries[c][r].conj()).norm() <= tol))
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let m = Matrix4::from_fn(|r, c| self.entries[r][c]);
        let eig = SymmetricEigen::new(m);
        let mut vals = [0.0; 4];
        for (v, e) in vals.iter_mut().zip(eig.eigenvalues.iter()) {
            *v = *e;
        }
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// Hermitian, unit trace and positive semidefinite, all within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && (self.trace() - ONE).norm() <= tol
            && self.eigenvalues().iter().all(|&e| e >= -tol)
    }

    /// Distribution of `(m_a, m_b)` when both qubits are measured in basis
    /// `h`, indexed `2 * m_a + m_b`.
    pub fn basis_probabilities(&self, h: u8) -> [f64; 4] {
        let mut probs = [0.0; 4];
        if h == 0 {
            for (i, p) in probs.iter_mut().enumerate() {
                *p = self.entries[i][i].re;
            }
        } else {
            // (H ⊗ H)[m][r] = (-1)^{popcount(m & r)} / 2
            let hh = |m: usize, r: usize| if (m & r).count_ones() % 2 == 0 { 0.5 } else { -0.5 };
            for (m, p) in probs.iter_mut().enumerate() {
                let mut acc = ZERO;
                for r in 0..4 {
                    for c in 0..4 {
                        acc += self.entries[r][c] * (hh(m, r) * hh(c, m));
                    }
                }
                *p = acc.re;
            }
        }
        for p in &mut probs {
            *p = p.max(0.0);
        }
        probs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::enumerate_branches;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_amps(state: &StateVector, expected: &[f64]) {
        assert_eq!(state.amplitudes().len(), expected.len());
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!((a - c(*e)).norm() < 1e-12, "{:?} vs {:?}", state.amplitudes(), expected);
        }
    }

    // independent Kronecker product on raw vectors
    fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
    }

    #[test]
    fn bb84_examples() {
        assert_amps(&prepare_bb84(0, &[1]), &[0.0, 1.0]);
        let s = FRAC_1_SQRT_2;
        assert_amps(&prepare_bb84(1, &[0]), &[s, s]);
        let minus = [s, -s];
        let plus = [s, s];
        let expected = kron(&minus, &plus);
        assert_amps(&prepare_bb84(1, &[1, 0]), &expected);
        assert_amps(&prepare_bb84(1, &[1, 0]), &[0.5, 0.5, -0.5, -0.5]);
    }

    #[test]
    fn gate_examples() {
        let s = FRAC_1_SQRT_2;
        let mut st = StateVector::zero(1);
        st.apply_gate(Gate::H, &[1]).unwrap();
        assert_amps(&st, &[s, s]);

        let mut st = StateVector::from_bits(&[1, 0]);
        st.apply_gate(Gate::Cnot, &[1, 2]).unwrap();
        assert_amps(&st, &[0.0, 0.0, 0.0, 1.0]);

        // H·Z·|+⟩ via explicit 2x2 matrices
        let hm = [[s, s], [s, -s]];
        let zm = [[1.0, 0.0], [0.0, -1.0]];
        let apply = |m: [[f64; 2]; 2], v: [f64; 2]| {
            [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
        };
        let expected = apply(hm, apply(zm, [s, s]));
        let mut st = prepare_bb84(1, &[0]);
        st.apply_gate(Gate::Z, &[1]).unwrap();
        st.apply_gate(Gate::H, &[1]).unwrap();
        assert_amps(&st, &expected);
        assert_amps(&st, &[0.0, 1.0]);
    }

    #[test]
    fn gate_index_errors() {
        let mut st = StateVector::zero(2);
        assert!(matches!(st.apply_gate(Gate::X, &[3]), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(st.apply_gate(Gate::X, &[0]), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(st.apply_gate(Gate::Cnot, &[1, 1]), Err(Error::DuplicateQubit(1))));
        assert!(matches!(st.apply_gate(Gate::H, &[1, 2]), Err(Error::GateArity { .. })));
    }

    #[test]
    fn qubit_one_is_most_significant() {
        let mut st = StateVector::zero(3);
        st.apply_gate(Gate::X, &[1]).unwrap();
        assert_eq!(st.amplitudes()[4], ONE);
    }

    #[test]
    fn bell_pair_examples() {
        let s = FRAC_1_SQRT_2;
        let pair = [s, 0.0, 0.0, s];
        assert_amps(&make_bell_pairs(1), &pair);
        assert_amps(&make_bell_pairs(2), &kron(&pair, &pair));
        for k in 1..=4 {
            assert!((make_bell_pairs(k).norm() - 1.0).abs() < TOLERANCE);
        }
    }

    #[test]
    fn deterministic_measurements() {
        let mut rng = RandomSource::new(3);
        for _ in 0..50 {
            let mut one = StateVector::from_bits(&[1]);
            assert_eq!(one.measure_qubit(1, 0, &mut rng).unwrap(), 1);
            let mut plus = prepare_bb84(1, &[0]);
            assert_eq!(plus.measure_qubit(1, 1, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn plus_in_computational_basis_is_fair() {
        let mut rng = RandomSource::new(11);
        let trials = 10_000;
        let zeros = (0..trials)
            .filter(|_| {
                let mut plus = prepare_bb84(1, &[0]);
                plus.measure_qubit(1, 0, &mut rng).unwrap() == 0
            })
            .count();
        let freq = zeros as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.01, "frequency {freq}");
    }

    #[test]
    fn repeated_measurement_is_stable() {
        let mut rng = RandomSource::new(5);
        for basis in [0, 1] {
            for _ in 0..20 {
                let mut st = StateVector::random(3, &mut rng);
                let first = st.measure_qubit(2, basis, &mut rng).unwrap();
                let again = st.measure_qubit(2, basis, &mut rng).unwrap();
                assert_eq!(first, again);
                assert!((st.norm() - 1.0).abs() < TOLERANCE);
            }
        }
    }

    #[test]
    fn bell_measure_on_phi_plus() {
        let leaves = enumerate_branches(|c| make_bell_pairs(1).bell_measure(1, 2, c).unwrap());
        assert_eq!(leaves.len(), 1);
        assert_eq!(leaves[0].1, (0, 0));
    }

    #[test]
    fn bell_measure_on_00() {
        // |00⟩ = (|Φ+⟩ + |Φ-⟩)/√2: x = 0, z uniform
        let leaves = enumerate_branches(|c| StateVector::zero(2).bell_measure(1, 2, c).unwrap());
        assert_eq!(leaves.len(), 2);
        for (p, (x, _z)) in &leaves {
            assert_eq!(*x, 0);
            assert!((p - 0.5).abs() < 1e-12);
        }
    }

    /// Independent teleportation check: receiver state for each outcome
    /// computed by projecting onto the explicit Bell basis vector.
    #[test]
    fn teleportation_identity_all_outcomes() {
        let mut rng = RandomSource::new(99);
        let psi = StateVector::random(1, &mut rng);
        let (al, be) = (psi.amplitudes()[0], psi.amplitudes()[1]);
        for (x, z) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            // explicit Bell vector for outcome (x, z); (0, 0) is Φ+
            let s = FRAC_1_SQRT_2;
            let sign = if z == 1 { -1.0 } else { 1.0 };
            let mut bell = [ZERO; 4];
            if x == 0 {
                bell[0] = c(s);
                bell[3] = c(sign * s);
            } else {
                bell[1] = c(s);
                bell[2] = c(sign * s);
            }
            // input ψ ⊗ Φ+ on qubits (A, B, C)
            let full = psi.tensor(&make_bell_pairs(1));
            let mut receiver = [ZERO; 2];
            for (i, amp) in full.amplitudes().iter().enumerate() {
                let ab = i >> 1;
                receiver[i & 1] += bell[ab].conj() * amp;
            }
            let mut rec = StateVector::normalized(receiver.to_vec()).unwrap();
            if x == 1 {
                rec.x(1);
            }
            if z == 1 {
                rec.z(1);
            }
            let expected = StateVector::from_amplitudes(vec![al, be]).unwrap();
            assert!(rec.fidelity(&expected) > 1.0 - TOLERANCE);

            // and the simulator's labeling agrees
            let leaves = enumerate_branches(|ch| {
                let mut st = full.clone();
                let out = st.bell_measure(1, 2, ch).unwrap();
                (out, st)
            });
            let (_, (_, post)) = leaves.iter().find(|(_, (o, _))| *o == (x, z)).unwrap();
            let mut projected = [ZERO; 2];
            for (i, amp) in post.amplitudes().iter().enumerate() {
                projected[i & 1] += bell[i >> 1].conj() * amp;
            }
            let mut rec2 = StateVector::normalized(projected.to_vec()).unwrap();
            if x == 1 {
                rec2.x(1);
            }
            if z == 1 {
                rec2.z(1);
            }
            assert!(rec2.fidelity(&expected) > 1.0 - TOLERANCE, "outcome {:?}", (x, z));
        }
    }

    fn naive_partial_trace(state: &StateVector, a: usize, b: usize) -> [[Complex64; 4]; 4] {
        let n = state.n_qubits();
        let amps = state.amplitudes();
        let bit = |i: usize, q: usize| (i >> (n - q)) & 1;
        let mut out = [[ZERO; 4]; 4];
        for i in 0..amps.len() {
            for j in 0..amps.len() {
                let same_rest = (1..=n)
                    .filter(|&q| q != a && q != b)
                    .all(|q| bit(i, q) == bit(j, q));
                if same_rest {
                    let r = 2 * bit(i, a) + bit(i, b);
                    let c = 2 * bit(j, a) + bit(j, b);
                    out[r][c] += amps[i] * amps[j].conj();
                }
            }
        }
        out
    }

    #[test]
    fn reduced_density_examples() {
        let rho = StateVector::zero(2).reduced_density(1, 2).unwrap();
        assert!((rho.entries[0][0] - ONE).norm() < 1e-12);
        assert!(rho.is_valid(TOLERANCE));

        let st = make_bell_pairs(1).tensor(&StateVector::zero(1));
        let rho = st.reduced_density(1, 2).unwrap();
        let expected = DensityMatrix2Q::pure(&make_bell_pairs(1)).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                assert!((rho.entries[r][col] - expected.entries[r][col]).norm() < 1e-12);
            }
        }

        let mut ghz = StateVector::zero(3);
        ghz.h(1);
        ghz.cnot(1, 2);
        ghz.cnot(2, 3);
        let rho = ghz.reduced_density(1, 2).unwrap();
        let oracle = naive_partial_trace(&ghz, 1, 2);
        for r in 0..4 {
            for col in 0..4 {
                assert!((rho.entries[r][col] - oracle[r][col]).norm() < 1e-12);
                let diag = if r == col && (r == 0 || r == 3) { 0.5 } else { 0.0 };
                assert!((rho.entries[r][col] - c(diag)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_density_matches_naive_on_random_states() {
        let mut rng = RandomSource::new(17);
        for (a, b) in [(1, 2), (1, 3), (2, 4), (3, 4)] {
            let st = StateVector::random(4, &mut rng);
            let rho = st.reduced_density(a, b).unwrap();
            let oracle = naive_partial_trace(&st, a, b);
            for r in 0..4 {
                for col in 0..4 {
                    assert!((rho.entries[r][col] - oracle[r][col]).norm() < 1e-12);
                }
            }
            assert!(rho.is_valid(TOLERANCE));
        }
    }

    #[test]
    fn reduced_density_index_errors() {
        let st = StateVector::zero(3);
        assert!(st.reduced_density(2, 1).is_err());
        assert!(st.reduced_density(1, 4).is_err());
        assert!(st.reduced_density(2, 2).is_err());
    }

    #[test]
    fn reduced_density_agrees_with_direct_measurement() {
        let mut rng = RandomSource::new(23);
        let st = StateVector::random(3, &mut rng);
        for h in [0u8, 1] {
            let rho = st.reduced_density(1, 3).unwrap();
            let from_rho = rho.basis_probabilities(h);
            let leaves = enumerate_branches(|ch| {
                let mut s = st.clone();
                let ma = s.measure_qubit(1, h, ch).unwrap();
                let mb = s.measure_qubit(3, h, ch).unwrap();
                (2 * ma + mb) as usize
            });
            let mut direct = [0.0; 4];
            for (p, k) in leaves {
                direct[k] += p;
            }
            for k in 0..4 {
                assert!((direct[k] - from_rho[k]).abs() < TOLERANCE);
            }
        }
    }
}
