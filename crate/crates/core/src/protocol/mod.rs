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

//! Protocol state machines.
//!
//! Six protocol variants share one set of party transitions:
//!
//! | variant      | who measures what                                              |
//! |--------------|----------------------------------------------------------------|
//! | `posthoc`    | prover submits an N-qubit state, verifier measures it          |
//! | `virtual1`   | verifier keeps Bell-pair halves, prover teleports, then verifier measures |
//! | `virtual2`   | as `virtual1` but the verifier measures before the prover      |
//! | `main`       | trusted center sends BB84 states to the prover, `(h, m)` to the verifier |
//! | `zk`         | as `main` but the verifier learns only `(h, a, b, m_a, m_b)`   |
//! | `virtual-zk` | center holds Bell-pair halves and measures after the prover    |
//!
//! The party logic in [`party`] is written as pure transitions so the
//! networked mode in [`crate::net`] can reuse it verbatim.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::quantum::StateVector;

pub mod party;
pub mod runner;
pub mod simulator;

pub use party::{
    center_sample, correct_bits, corrected_bit, decide_main, decide_zk, honest_prover,
    parity_accepts, verifier_decide, verifier_decide_zk,
};
pub use runner::{run_protocol, ProtocolRunner, ProverParty};
pub use simulator::{zk_simulator, ZkSimulator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Posthoc,
    Virtual1,
    Virtual2,
    Main,
    Zk,
    VirtualZk,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Posthoc,
        Variant::Virtual1,
        Variant::Virtual2,
        Variant::Main,
        Variant::Zk,
        Variant::VirtualZk,
    ];

    pub fn is_zk(self) -> bool {
        matches!(self, Variant::Zk | Variant::VirtualZk)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Posthoc => "posthoc",
            Variant::Virtual1 => "virtual1",
            Variant::Virtual2 => "virtual2",
            Variant::Main => "main",
            Variant::Zk => "zk",
            Variant::VirtualZk => "virtual-zk",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variant `{s}`")))
    }
}

/// The trusted center's secret for one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterKey {
    pub h: u8,
    pub m: Vec<u8>,
    /// The revealed pair `(a, b)`, `a < b`, in zero-knowledge mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zk_pair: Option<(usize, usize)>,
}

impl CenterKey {
    pub fn n_qubits(&self) -> usize {
        self.m.len()
    }

    /// What the zero-knowledge verifier is sent: `(h, a, b, m_a, m_b)`.
    pub fn zk_message(&self) -> Option<ZkCenterMessage> {
        let (a, b) = self.zk_pair?;
        Some(ZkCenterMessage {
            h: self.h,
            a,
            b,
            m_a: self.m[a - 1],
            m_b: self.m[b - 1],
        })
    }
}

/// The center-to-verifier message in zero-knowledge mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZkCenterMessage {
    pub h: u8,
    pub a: usize,
    pub b: usize,
    pub m_a: u8,
    pub m_b: u8,
}

/// The prover's `2N`-bit report of teleportation byproducts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProverAnswer {
    pub x: Vec<u8>,
    pub z: Vec<u8>,
}

impl ProverAnswer {
    pub fn zeros(n: usize) -> Self {
        Self {
            x: vec![0; n],
            z: vec![0; n],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    /// XORs masks into `x` and `z`.
    pub fn flipped(mut self, x_mask: &[u8], z_mask: &[u8]) -> Self {
        for (b, m) in self.x.iter_mut().zip(x_mask) {
            *b ^= m;
        }
        for (b, m) in self.z.iter_mut().zip(z_mask) {
            *b ^= m;
        }
        self
    }
}

/// How the prover behaves.
#[derive(Debug, Clone, PartialEq)]
pub enum ProverStrategy {
    /// Teleports the ground state of the instance.
    Honest,
    /// Teleports a caller-supplied N-qubit state (in `posthoc`, submits it).
    HonestWithState(StateVector),
    /// Honest, then XORs fixed masks into the reported `x` and `z`.
    ByproductFlip { x_mask: Vec<u8>, z_mask: Vec<u8> },
    /// Reports a fixed `(x, z)` and ignores its qubits.
    Constant(ProverAnswer),
}

impl ProverStrategy {
    pub fn kind(&self) -> &'static str {
        match self {
            ProverStrategy::Honest => "honest",
            ProverStrategy::HonestWithState(_) => "honest-with-state",
            ProverStrategy::ByproductFlip { .. } => "byproduct-flip",
            ProverStrategy::Constant(_) => "constant",
        }
    }

    /// Short human-readable label including the payload where it is small.
    pub fn label(&self) -> String {
        let bits = |v: &[u8]| v.iter().map(|b| char::from(b'0' + b)).collect::<String>();
        match self {
            ProverStrategy::Honest => "honest".into(),
            ProverStrategy::HonestWithState(s) => format!("honest-with-state[{} qubits]", s.n_qubits()),
            ProverStrategy::ByproductFlip { x_mask, z_mask } => {
                format!("byproduct-flip[x={},z={}]", bits(x_mask), bits(z_mask))
            }
            ProverStrategy::Constant(a) => format!("constant[x={},z={}]", bits(&a.x), bits(&a.z)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn from_bool(accept: bool) -> Self {
        if accept {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

/// The verifier's side of a run: what it checked and what it concluded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub check_pair: (usize, usize),
    pub sign: i8,
    /// `(index, m'_index)` for every index the verifier corrected.
    pub corrected_bits: Vec<(usize, u8)>,
    pub verdict: Verdict,
}

/// One full protocol execution. Self-verifying: [`TrialRecord::redecide`]
/// recomputes the verdict from the other fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub protocol: Variant,
    /// The basis and measured/sent bits; in the virtual variants these are
    /// the verifier's (or center's) measurement results.
    pub key: CenterKey,
    /// Absent in `posthoc`, where the verifier measures the state itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<ProverAnswer>,
    pub check_pair: (usize, usize),
    pub sign: i8,
    pub corrected_bits: Vec<(usize, u8)>,
    pub verdict: Verdict,
}

/// Everything the zero-knowledge verifier observes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZkView {
    pub h: u8,
    pub a: usize,
    pub b: usize,
    pub m_a: u8,
    pub m_b: u8,
    pub x: Vec<u8>,
    pub z: Vec<u8>,
}

impl TrialRecord {
    pub(crate) fn assemble(
        protocol: Variant,
        key: CenterKey,
        answer: Option<ProverAnswer>,
        decision: Decision,
    ) -> Self {
        Self {
            protocol,
            key,
            answer,
            check_pair: decision.check_pair,
            sign: decision.sign,
            corrected_bits: decision.corrected_bits,
            verdict: decision.verdict,
        }
    }

    /// Recomputes the verdict from key, answer, check pair and sign. Returns
    /// `None` if the recorded corrected bits disagree with the key and answer.
    pub fn redecide(&self) -> Option<Verdict> {
        for &(idx, bit) in &self.corrected_bits {
            let expected = match &self.answer {
                Some(ans) => corrected_bit(self.key.h, self.key.m[idx - 1], ans.x[idx - 1], ans.z[idx - 1]),
                None => self.key.m[idx - 1],
            };
            if expected != bit {
                return None;
            }
        }
        let lookup = |q: usize| {
            self.corrected_bits
                .iter()
                .find(|(i, _)| *i == q)
                .map(|&(_, b)| b)
        };
        let (i, j) = self.check_pair;
        let accept = if self.protocol.is_zk() {
            let pair = self.key.zk_pair?;
            if pair != (i, j) {
                true
            } else {
                parity_accepts(self.sign, lookup(i)?, lookup(j)?)
            }
        } else {
            parity_accepts(self.sign, lookup(i)?, lookup(j)?)
        };
        Some(Verdict::from_bool(accept))
    }

    /// The `(h, a, b, m_a, m_b, x, z)` projection seen by the ZK verifier.
    pub fn zk_view(&self) -> Option<ZkView> {
        let msg = self.key.zk_message()?;
        let ans = self.answer.as_ref()?;
        Some(ZkView {
            h: msg.h,
            a: msg.a,
            b: msg.b,
            m_a: msg.m_a,
            m_b: msg.m_b,
            x: ans.x.clone(),
            z: ans.z.clone(),
        })
    }
}

/// All pairs `(a, b)` with `1 <= a < b <= n`, in lexicographic order.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect()
}
