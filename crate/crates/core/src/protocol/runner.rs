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

//! In-process execution of whole protocol runs.

use crate::error::{Error, Result};
use crate::hamiltonian::{GroundState, XZHamiltonian};
use crate::quantum::{make_bell_pairs, prepare_bb84, StateVector};
use crate::rng::Chooser;

use super::party::{center_sample, decide_main, decide_zk, honest_prover};
use super::{all_pairs, CenterKey, ProverAnswer, ProverStrategy, TrialRecord, Variant};

/// A strategy with its quantum payload resolved against an instance.
#[derive(Debug, Clone)]
pub(crate) enum ResolvedProver {
    /// Teleports `state` and XORs the masks into the report.
    Teleport {
        state: StateVector,
        x_mask: Vec<u8>,
        z_mask: Vec<u8>,
    },
    Constant(ProverAnswer),
}

impl ResolvedProver {
    pub(crate) fn resolve(
        ham: &XZHamiltonian,
        strategy: &ProverStrategy,
        ground: Option<&GroundState>,
    ) -> Result<Self> {
        let n = ham.n_qubits;
        let ground_state = || -> Result<StateVector> {
            match ground {
                Some(g) => Ok(g.state.clone()),
                None => Ok(ham.ground_state()?.state),
            }
        };
        let check_len = |what: &str, v: &[u8]| {
            if v.len() != n || v.iter().any(|&b| b > 1) {
                Err(Error::IncompatibleStrategy(format!("{what} must be {n} bits")))
            } else {
                Ok(())
            }
        };
        Ok(match strategy {
            ProverStrategy::Honest => ResolvedProver::Teleport {
                state: ground_state()?,
                x_mask: vec![0; n],
                z_mask: vec![0; n],
            },
            ProverStrategy::HonestWithState(state) => {
                if state.n_qubits() != n {
                    return Err(Error::IncompatibleStrategy(format!(
                        "supplied state has {} qubits, instance has {n}",
                        state.n_qubits()
                    )));
                }
                ResolvedProver::Teleport {
                    state: state.clone(),
                    x_mask: vec![0; n],
                    z_mask: vec![0; n],
                }
            }
            ProverStrategy::ByproductFlip { x_mask, z_mask } => {
                check_len("x mask", x_mask)?;
                check_len("z mask", z_mask)?;
                ResolvedProver::Teleport {
                    state: ground_state()?,
                    x_mask: x_mask.clone(),
                    z_mask: z_mask.clone(),
                }
            }
            ProverStrategy::Constant(answer) => {
                check_len("x", &answer.x)?;
                check_len("z", &answer.z)?;
                ResolvedProver::Constant(answer.clone())
            }
        })
    }

    /// The prover's answer given unentangled received qubits.
    fn answer_on(&self, received: &StateVector, rng: &mut impl Chooser) -> Result<ProverAnswer> {
        match self {
            ResolvedProver::Teleport { state, x_mask, z_mask } => {
                Ok(honest_prover(received, state, rng)?.flipped(x_mask, z_mask))
            }
            ResolvedProver::Constant(answer) => Ok(answer.clone()),
        }
    }

    /// Runs the prover on qubits that are entangled with the verifier's
    /// Bell halves. In `pairs`, the prover holds qubit `2j - 1` of pair `j`.
    /// Returns the answer, the updated joint state, and how many qubits the
    /// prover prepended to it.
    fn answer_on_entangled(
        &self,
        pairs: StateVector,
        rng: &mut impl Chooser,
    ) -> Result<(ProverAnswer, StateVector, usize)> {
        match self {
            ResolvedProver::Teleport { state, x_mask, z_mask } => {
                let n = state.n_qubits();
                let mut joint = state.tensor(&pairs);
                let mut answer = ProverAnswer::zeros(n);
                for j in 1..=n {
                    let (x, z) = joint.bell_measure(j, n + 2 * j - 1, rng)?;
                    answer.x[j - 1] = x;
                    answer.z[j - 1] = z;
                }
                Ok((answer.flipped(x_mask, z_mask), joint, n))
            }
            ResolvedProver::Constant(answer) => Ok((answer.clone(), pairs, 0)),
        }
    }

    /// What this prover hands over in the posthoc protocol: the state it
    /// would teleport with the reported-byproduct flips folded in. A prover
    /// that ignores its qubits corresponds to the maximally mixed state,
    /// realised as a uniformly random basis state.
    fn posthoc_submission(&self, n: usize, rng: &mut impl Chooser) -> StateVector {
        match self {
            ResolvedProver::Teleport { state, x_mask, z_mask } => {
                let mut s = state.clone();
                s.apply_pauli_pad(x_mask, z_mask);
                s
            }
            ResolvedProver::Constant(_) => StateVector::basis(n, rng.uniform(1 << n)),
        }
    }
}

/// The prover as a standalone party: receives the BB84 description that
/// stands in for the center's qubits and produces its report.
#[derive(Debug, Clone)]
pub struct ProverParty {
    n_qubits: usize,
    prover: ResolvedProver,
}

impl ProverParty {
    pub fn new(ham: &XZHamiltonian, strategy: &ProverStrategy) -> Result<Self> {
        ham.check()?;
        Ok(Self {
            n_qubits: ham.n_qubits,
            prover: ResolvedProver::resolve(ham, strategy, None)?,
        })
    }

    /// Rebuilds `⊗_j H^h |m_j⟩` locally and runs the strategy on it.
    pub fn respond(&self, h: u8, m: &[u8], rng: &mut impl Chooser) -> Result<ProverAnswer> {
        if m.len() != self.n_qubits {
            return Err(Error::SizeMismatch {
                expected: self.n_qubits,
                found: m.len(),
            });
        }
        self.prover.answer_on(&prepare_bb84(h, m), rng)
    }
}

/// A protocol variant bound to an instance and a prover strategy. Resolving
/// the strategy (which may need the ground state) happens once here, so
/// [`run_trial`](Self::run_trial) is cheap and can be called from many
/// threads.
#[derive(Debug, Clone)]
pub struct ProtocolRunner<'a> {
    variant: Variant,
    ham: &'a XZHamiltonian,
    prover: ResolvedProver,
}

impl<'a> ProtocolRunner<'a> {
    pub fn new(variant: Variant, ham: &'a XZHamiltonian, strategy: &ProverStrategy) -> Result<Self> {
        ham.check()?;
        Ok(Self {
            variant,
            ham,
            prover: ResolvedProver::resolve(ham, strategy, None)?,
        })
    }

    /// Like [`new`](Self::new) with a precomputed ground state.
    pub fn with_ground_state(
        variant: Variant,
        ham: &'a XZHamiltonian,
        strategy: &ProverStrategy,
        ground: &GroundState,
    ) -> Result<Self> {
        ham.check()?;
        Ok(Self {
            variant,
            ham,
            prover: ResolvedProver::resolve(ham, strategy, Some(ground))?,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn hamiltonian(&self) -> &XZHamiltonian {
        self.ham
    }

    /// One complete run.
    pub fn run_trial(&self, rng: &mut impl Chooser) -> Result<TrialRecord> {
        let n = self.ham.n_qubits;
        match self.variant {
            Variant::Posthoc => {
                let mut submitted = self.prover.posthoc_submission(n, rng);
                let h = rng.bit();
                let mut m = Vec::with_capacity(n);
                for q in 1..=n {
                    m.push(submitted.measure_qubit(q, h, rng)?);
                }
                let decision = decide_main(self.ham, h, &m, None, rng)?;
                let key = CenterKey { h, m, zk_pair: None };
                Ok(TrialRecord::assemble(Variant::Posthoc, key, None, decision))
            }
            Variant::Virtual1 | Variant::Virtual2 | Variant::VirtualZk => self.run_virtual(rng),
            Variant::Main | Variant::Zk => {
                let zk = self.variant == Variant::Zk;
                let key = center_sample(n, zk, rng)?;
                let bb84 = prepare_bb84(key.h, &key.m);
                let answer = self.prover.answer_on(&bb84, rng)?;
                let decision = if zk {
                    let msg = key.zk_message().expect("ZK key carries a pair");
                    decide_zk(self.ham, &msg, &answer, rng)?
                } else {
                    decide_main(self.ham, key.h, &key.m, Some(&answer), rng)?
                };
                Ok(TrialRecord::assemble(self.variant, key, Some(answer), decision))
            }
        }
    }

    /// The Bell-pair variants. The full entangled state is simulated and
    /// the measurement order differs between them: in `virtual2` the
    /// verifier measures its halves before the prover acts, in `virtual1`
    /// and `virtual-zk` after.
    fn run_virtual(&self, rng: &mut impl Chooser) -> Result<TrialRecord> {
        let n = self.ham.n_qubits;
        let h = rng.bit();
        let pairs = make_bell_pairs(n);

        let (m, answer) = if self.variant == Variant::Virtual2 {
            let mut pairs = pairs;
            let m = measure_halves(&mut pairs, 0, n, h, rng)?;
            let (answer, _, _) = self.prover.answer_on_entangled(pairs, rng)?;
            (m, answer)
        } else {
            let (answer, mut joint, offset) = self.prover.answer_on_entangled(pairs, rng)?;
            let m = measure_halves(&mut joint, offset, n, h, rng)?;
            (m, answer)
        };

        if self.variant == Variant::VirtualZk {
            let all = all_pairs(n);
            let pair = all[rng.uniform(all.len())];
            let key = CenterKey { h, m, zk_pair: Some(pair) };
            let msg = key.zk_message().expect("pair just set");
            let decision = decide_zk(self.ham, &msg, &answer, rng)?;
            Ok(TrialRecord::assemble(Variant::VirtualZk, key, Some(answer), decision))
        } else {
            let decision = decide_main(self.ham, h, &m, Some(&answer), rng)?;
            let key = CenterKey { h, m, zk_pair: None };
            Ok(TrialRecord::assemble(self.variant, key, Some(answer), decision))
        }
    }
}

/// Measures the verifier's Bell halves (qubit `offset + 2j` for pair `j`)
/// in basis `h`.
fn measure_halves(
    state: &mut StateVector,
    offset: usize,
    n: usize,
    h: u8,
    rng: &mut impl Chooser,
) -> Result<Vec<u8>> {
    (1..=n)
        .map(|j| state.measure_qubit(offset + 2 * j, h, rng))
        .collect()
}

/// One run of `variant` on `ham` with `strategy`.
pub fn run_protocol(
    variant: Variant,
    ham: &XZHamiltonian,
    strategy: &ProverStrategy,
    rng: &mut impl Chooser,
) -> Result<TrialRecord> {
    ProtocolRunner::new(variant, ham, strategy)?.run_trial(rng)
}
