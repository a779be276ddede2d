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

//! Classical simulator for the zero-knowledge verifier's view.
//!
//! Samples `h`, `(x, z)` and `(a, b)` uniformly, then draws `(m_a, m_b)`
//! from the two-qubit reduced state of `X^x Z^z |G⟩` measured in basis `h`.
//! It never touches a prover or a center.

use crate::error::Result;
use crate::hamiltonian::{GroundState, XZHamiltonian};
use crate::rng::Chooser;

use super::{all_pairs, ZkView};

#[derive(Debug, Clone)]
pub struct ZkSimulator {
    ground: GroundState,
    pairs: Vec<(usize, usize)>,
}

impl ZkSimulator {
    /// Computes the ground state once; fails above the eigensolver cap.
    pub fn new(ham: &XZHamiltonian) -> Result<Self> {
        ham.check()?;
        Ok(Self::with_ground_state(ham, ham.ground_state()?))
    }

    pub fn with_ground_state(ham: &XZHamiltonian, ground: GroundState) -> Self {
        Self {
            ground,
            pairs: all_pairs(ham.n_qubits),
        }
    }

    pub fn ground(&self) -> &GroundState {
        &self.ground
    }

    pub fn sample(&self, rng: &mut impl Chooser) -> Result<ZkView> {
        let n = self.ground.state.n_qubits();
        let h = rng.bit();
        let x = rng.bits(n);
        let z = rng.bits(n);
        let (a, b) = self.pairs[rng.uniform(self.pairs.len())];

        let mut padded = self.ground.state.clone();
        padded.apply_pauli_pad(&x, &z);
        let rho = padded.reduced_density(a, b)?;
        let outcome = rng.choose(&rho.basis_probabilities(h));

        Ok(ZkView {
            h,
            a,
            b,
            m_a: (outcome >> 1) as u8,
            m_b: (outcome & 1) as u8,
            x,
            z,
        })
    }
}

/// One simulator output for `ham`.
pub fn zk_simulator(ham: &XZHamiltonian, rng: &mut impl Chooser) -> Result<ZkView> {
    ZkSimulator::new(ham)?.sample(rng)
}
