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

//! Party transitions: center key generation, the honest prover's Bell
//! measurements, byproduct correction and the verifier's decision rules.

use crate::error::{Error, Result};
use crate::hamiltonian::XZHamiltonian;
use crate::quantum::StateVector;
use crate::rng::Chooser;

use super::{all_pairs, CenterKey, Decision, ProverAnswer, TrialRecord, Variant, Verdict, ZkCenterMessage};

/// Samples `(h, m_1..m_N)` uniformly, and in ZK mode a uniform pair
/// `a < b`. Takes no instance: the key cannot depend on it.
pub fn center_sample(n_qubits: usize, zk: bool, rng: &mut impl Chooser) -> Result<CenterKey> {
    if n_qubits < 2 {
        return Err(Error::InvalidArgument(format!("center needs N >= 2, got {n_qubits}")));
    }
    let h = rng.bit();
    let m = rng.bits(n_qubits);
    let zk_pair = if zk {
        let pairs = all_pairs(n_qubits);
        Some(pairs[rng.uniform(pairs.len())])
    } else {
        None
    };
    Ok(CenterKey { h, m, zk_pair })
}

/// Teleports `local_state` through the received qubits: forms
/// `local_state ⊗ received` and Bell-measures local qubit `j` against
/// received qubit `j`, for `j = 1..N`.
pub fn honest_prover(
    received: &StateVector,
    local_state: &StateVector,
    rng: &mut impl Chooser,
) -> Result<ProverAnswer> {
    let n = local_state.n_qubits();
    if received.n_qubits() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: received.n_qubits(),
        });
    }
    let mut joint = local_state.tensor(received);
    let mut answer = ProverAnswer::zeros(n);
    for j in 1..=n {
        let (x, z) = joint.bell_measure(j, n + j, rng)?;
        answer.x[j - 1] = x;
        answer.z[j - 1] = z;
    }
    Ok(answer)
}

/// `m'_j = m_j ⊕ (h z_j + (1 - h) x_j)`.
pub fn corrected_bit(h: u8, m: u8, x: u8, z: u8) -> u8 {
    m ^ if h == 1 { z } else { x }
}

/// Corrected bits for the 1-based `indices`.
pub fn correct_bits(key: &CenterKey, answer: &ProverAnswer, indices: &[usize]) -> Vec<u8> {
    indices
        .iter()
        .map(|&j| corrected_bit(key.h, key.m[j - 1], answer.x[j - 1], answer.z[j - 1]))
        .collect()
}

/// `(-1)^{m_i} (-1)^{m_j} = -s`.
pub fn parity_accepts(sign: i8, mi: u8, mj: u8) -> bool {
    let product = if (mi ^ mj) == 0 { 1 } else { -1 };
    product == -i32::from(sign)
}

fn sign_of(ham: &XZHamiltonian, pair: (usize, usize)) -> i8 {
    ham.term(pair.0, pair.1).map(|t| t.s).expect("sampled pair is an instance term")
}

/// Decision of the main-protocol verifier given `(h, m)` and bits that are
/// already corrected for every index (`corrected[j - 1] = m'_j`).
fn decide_on_corrected(ham: &XZHamiltonian, corrected: &[u8], rng: &mut impl Chooser) -> Decision {
    let (i, j) = ham.sample_term(rng);
    let sign = sign_of(ham, (i, j));
    let (mi, mj) = (corrected[i - 1], corrected[j - 1]);
    Decision {
        check_pair: (i, j),
        sign,
        corrected_bits: corrected.iter().enumerate().map(|(k, &b)| (k + 1, b)).collect(),
        verdict: Verdict::from_bool(parity_accepts(sign, mi, mj)),
    }
}

/// Main-protocol verifier: correct every bit, sample a term, check parity.
/// With no answer (posthoc) the measured bits are used as they are.
pub fn decide_main(
    ham: &XZHamiltonian,
    h: u8,
    m: &[u8],
    answer: Option<&ProverAnswer>,
    rng: &mut impl Chooser,
) -> Result<Decision> {
    let n = ham.n_qubits;
    if m.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: m.len() });
    }
    let corrected: Vec<u8> = match answer {
        Some(ans) => {
            if ans.x.len() != n || ans.z.len() != n {
                return Err(Error::SizeMismatch { expected: n, found: ans.x.len().min(ans.z.len()) });
            }
            (0..n).map(|k| corrected_bit(h, m[k], ans.x[k], ans.z[k])).collect()
        }
        None => m.to_vec(),
    };
    Ok(decide_on_corrected(ham, &corrected, rng))
}

/// Zero-knowledge verifier: sees only `(h, a, b, m_a, m_b)` and the answer.
/// Accepts outright unless the sampled term is exactly `(a, b)`.
pub fn decide_zk(
    ham: &XZHamiltonian,
    msg: &ZkCenterMessage,
    answer: &ProverAnswer,
    rng: &mut impl Chooser,
) -> Result<Decision> {
    let n = ham.n_qubits;
    if answer.x.len() != n || answer.z.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: answer.x.len().min(answer.z.len()) });
    }
    if !(1 <= msg.a && msg.a < msg.b && msg.b <= n) {
        return Err(Error::InvalidArgument(format!("bad ZK pair ({}, {})", msg.a, msg.b)));
    }
    let ma = corrected_bit(msg.h, msg.m_a, answer.x[msg.a - 1], answer.z[msg.a - 1]);
    let mb = corrected_bit(msg.h, msg.m_b, answer.x[msg.b - 1], answer.z[msg.b - 1]);
    let (i, j) = ham.sample_term(rng);
    let sign = sign_of(ham, (i, j));
    let accept = (i, j) != (msg.a, msg.b) || parity_accepts(sign, ma, mb);
    Ok(Decision {
        check_pair: (i, j),
        sign,
        corrected_bits: vec![(msg.a, ma), (msg.b, mb)],
        verdict: Verdict::from_bool(accept),
    })
}

/// Main-protocol verifier as a whole-record transition.
pub fn verifier_decide(
    ham: &XZHamiltonian,
    key: &CenterKey,
    answer: &ProverAnswer,
    rng: &mut impl Chooser,
) -> Result<TrialRecord> {
    if key.zk_pair.is_some() {
        return Err(Error::ModeMismatch("main-protocol verifier given a ZK key".into()));
    }
    let decision = decide_main(ham, key.h, &key.m, Some(answer), rng)?;
    Ok(TrialRecord::assemble(Variant::Main, key.clone(), Some(answer.clone()), decision))
}

/// ZK verifier as a whole-record transition. Only `key.zk_message()` is
/// consulted for the decision.
pub fn verifier_decide_zk(
    ham: &XZHamiltonian,
    key: &CenterKey,
    answer: &ProverAnswer,
    rng: &mut impl Chooser,
) -> Result<TrialRecord> {
    let msg = key
        .zk_message()
        .ok_or_else(|| Error::ModeMismatch("ZK verifier given a key without (a, b)".into()))?;
    let decision = decide_zk(ham, &msg, answer, rng)?;
    Ok(TrialRecord::assemble(Variant::Zk, key.clone(), Some(answer.clone()), decision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::XZTerm;
    use crate::quantum::prepare_bb84;
    use crate::rng::{enumerate_branches, RandomSource};

    #[test]
    fn center_key_is_uniform() {
        let mut rng = RandomSource::new(8);
        let draws = 10_000;
        let mut counts = [0usize; 8];
        for _ in 0..draws {
            let key = center_sample(2, false, &mut rng).unwrap();
            assert!(key.zk_pair.is_none());
            counts[usize::from(key.h) * 4 + usize::from(key.m[0]) * 2 + usize::from(key.m[1])] += 1;
        }
        for c in counts {
            assert!((c as f64 / draws as f64 - 0.125).abs() <= 0.02);
        }

        let mut pair_counts = [0usize; 3];
        for _ in 0..draws {
            let key = center_sample(3, true, &mut rng).unwrap();
            let idx = all_pairs(3).iter().position(|&p| Some(p) == key.zk_pair).unwrap();
            pair_counts[idx] += 1;
        }
        for c in pair_counts {
            assert!((c as f64 / draws as f64 - 1.0 / 3.0).abs() <= 0.02);
        }
        assert!(center_sample(1, false, &mut rng).is_err());
    }

    #[test]
    fn center_key_exact_law() {
        let leaves = enumerate_branches(|c| center_sample(3, true, c).unwrap());
        assert_eq!(leaves.len(), 16 * 3);
        for (p, _) in leaves {
            assert!((p - 1.0 / 48.0).abs() < 1e-12);
        }
    }

    #[test]
    fn correction_examples() {
        assert_eq!(corrected_bit(0, 1, 1, 0), 0);
        assert_eq!(corrected_bit(1, 0, 1, 0), 0);
        assert_eq!(corrected_bit(1, 1, 0, 1), 0);
        let key = CenterKey { h: 0, m: vec![1, 0, 1], zk_pair: None };
        let ans = ProverAnswer { x: vec![1, 1, 0], z: vec![0, 0, 1] };
        assert_eq!(correct_bits(&key, &ans, &[1, 2, 3]), vec![0, 1, 1]);
        assert_eq!(correct_bits(&key, &ans, &[3]), vec![1]);
    }

    #[test]
    fn parity_rule_examples() {
        assert!(parity_accepts(1, 0, 1));
        assert!(!parity_accepts(1, 0, 0));
        assert!(parity_accepts(-1, 1, 1));
        assert!(!parity_accepts(-1, 1, 0));
    }

    #[test]
    fn honest_prover_on_00() {
        // local |0⟩, received |0⟩ (h = 0, m = 0): x is forced to 0, z uniform
        let local = StateVector::zero(1);
        let bb84 = prepare_bb84(0, &[0]);
        let leaves = enumerate_branches(|c| honest_prover(&bb84, &local, c).unwrap());
        let m = 0u8;
        assert_eq!(leaves.len(), 2);
        for (p, ans) in &leaves {
            assert_eq!(m ^ ans.x[0], 0);
            assert!((p - 0.5).abs() < 1e-12);
        }
        assert_ne!(leaves[0].1.z, leaves[1].1.z);
    }

    #[test]
    fn honest_prover_with_two_qubits_lets_x_vary() {
        // with N = 2 each Bell measurement against a BB84 qubit gives uniform (x, z)
        let local = StateVector::zero(2);
        let bb84 = prepare_bb84(1, &[0, 1]);
        let leaves = enumerate_branches(|c| honest_prover(&bb84, &local, c).unwrap());
        assert_eq!(leaves.len(), 16);
        assert!(leaves.iter().all(|(_, a)| a.x.len() == 2 && a.z.len() == 2));
    }

    #[test]
    fn honest_prover_size_mismatch() {
        let mut rng = RandomSource::new(1);
        assert!(honest_prover(&StateVector::zero(2), &StateVector::zero(3), &mut rng).is_err());
    }

    #[test]
    fn verifier_mode_checks() {
        let ham = XZHamiltonian::bell(1);
        let mut rng = RandomSource::new(2);
        let zk_key = CenterKey { h: 0, m: vec![0, 1], zk_pair: Some((1, 2)) };
        let plain = CenterKey { zk_pair: None, ..zk_key.clone() };
        let ans = ProverAnswer::zeros(2);
        assert!(matches!(verifier_decide(&ham, &zk_key, &ans, &mut rng), Err(Error::ModeMismatch(_))));
        assert!(matches!(verifier_decide_zk(&ham, &plain, &ans, &mut rng), Err(Error::ModeMismatch(_))));

        // s = +1, m' = (0, 1) accepts
        let rec = verifier_decide(&ham, &plain, &ans, &mut rng).unwrap();
        assert_eq!(rec.verdict, Verdict::Accept);
        assert_eq!(rec.redecide(), Some(Verdict::Accept));
        // s = +1, m' = (0, 0) rejects
        let rec = verifier_decide(&ham, &CenterKey { m: vec![0, 0], ..plain.clone() }, &ans, &mut rng).unwrap();
        assert_eq!(rec.verdict, Verdict::Reject);
    }

    #[test]
    fn zk_verifier_accepts_off_pair() {
        let ham = XZHamiltonian::new(3, vec![XZTerm::new(1, 3, 1.0, 1)]).unwrap();
        let mut rng = RandomSource::new(4);
        let key = CenterKey { h: 0, m: vec![0, 0, 0], zk_pair: Some((1, 2)) };
        let rec = verifier_decide_zk(&ham, &key, &ProverAnswer::zeros(3), &mut rng).unwrap();
        assert_eq!(rec.check_pair, (1, 3));
        assert_eq!(rec.verdict, Verdict::Accept);

        let on_pair = CenterKey { zk_pair: Some((1, 3)), ..key };
        let rec = verifier_decide_zk(&ham, &on_pair, &ProverAnswer::zeros(3), &mut rng).unwrap();
        assert_eq!(rec.verdict, Verdict::Reject);
        assert_eq!(rec.redecide(), Some(Verdict::Reject));
    }
}
