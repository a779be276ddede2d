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

//! Simulation lab for non-interactive classical verification of quantum
//! computation with a trusted center.
//!
//! A trusted center sends random BB84 states `⊗_j H^h |m_j⟩` to a prover and
//! their classical description `(h, m)` to a classical verifier. The prover
//! teleports a ground state of a 2-local XZ Hamiltonian through those qubits
//! and reports the teleportation byproducts `(x, z)`; the verifier undoes the
//! byproducts on its copy of `m` and checks one randomly chosen two-qubit
//! parity. A variant that reveals only two bits of `m` to the verifier is
//! statistical zero-knowledge.
//!
//! Modules:
//!
//! * [`quantum`]: exact state-vector simulation, Bell measurements, partial traces.
//! * [`hamiltonian`]: XZ instances, energies, exact ground states.
//! * [`protocol`]: the six protocol variants and the zero-knowledge simulator.
//! * [`analysis`]: Monte Carlo and exact acceptance probabilities, view
//!   distributions, adversary sweeps, parallel repetition.
//! * [`instance`], [`wire`], [`net`], [`cli`]: file formats, the framed wire
//!   protocol, the three-process networked mode and the command line.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod instance;
pub mod net;
pub mod protocol;
pub mod quantum;
pub mod rng;
pub mod wire;

pub use error::{Error, Result};
pub use hamiltonian::{XZHamiltonian, XZTerm};
pub use protocol::{ProverStrategy, TrialRecord, Variant, Verdict};
pub use quantum::StateVector;
pub use rng::{Chooser, RandomSource};
