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

use proptest::prelude::*;
use tcverify::analysis::{
    adversary_sweep, estimate_pacc, exact_pacc, tvd, view_distribution, ViewMode, ViewSource,
};
use tcverify::hamiltonian::PromiseLabel;
use tcverify::protocol::{
    all_pairs, decide_zk, run_protocol, verifier_decide, CenterKey, ProverAnswer, ZkCenterMessage,
};
use tcverify::quantum::Gate;
use tcverify::{Error, ProverStrategy, RandomSource, StateVector, Variant, Verdict, XZHamiltonian, XZTerm};

fn phi_plus() -> StateVector {
    let mut s = StateVector::zero(2);
    s.apply_gate(Gate::H, &[1]).unwrap();
    s.apply_gate(Gate::Cnot, &[1, 2]).unwrap();
    s
}

fn frustrated() -> XZHamiltonian {
    XZHamiltonian::new(
        3,
        vec![XZTerm::new(1, 2, 0.5, -1), XZTerm::new(1, 3, 0.3, 1), XZTerm::new(2, 3, 0.2, -1)],
    )
    .unwrap()
}

fn strategies(n: usize, seed: u64) -> Vec<ProverStrategy> {
    let mut x_mask = vec![0; n];
    x_mask[n - 1] = 1;
    vec![
        ProverStrategy::Honest,
        ProverStrategy::HonestWithState(StateVector::random(n, &mut RandomSource::new(seed))),
        ProverStrategy::ByproductFlip { x_mask: x_mask.clone(), z_mask: x_mask },
        ProverStrategy::Constant(ProverAnswer::zeros(n)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn transcripts_are_self_verifying(seed in any::<u64>(), v in 0usize..6, s in 0usize..4, n in 2usize..=3) {
        let ham = XZHamiltonian::random(n, &mut RandomSource::new(seed ^ 0x5a));
        let strategy = &strategies(n, seed)[s];
        let record = run_protocol(Variant::ALL[v], &ham, strategy, &mut RandomSource::new(seed)).unwrap();
        prop_assert_eq!(record.redecide(), Some(record.verdict));
        let line = serde_json::to_string(&record).unwrap();
        prop_assert_eq!(serde_json::from_str::<tcverify::TrialRecord>(&line).unwrap(), record);
    }
}

#[test]
fn honest_main_on_bell_accepts_every_seed() {
    let ham = XZHamiltonian::bell(-1);
    for seed in 0..500 {
        let r = run_protocol(Variant::Main, &ham, &ProverStrategy::Honest, &mut RandomSource::new(seed)).unwrap();
        assert_eq!(r.verdict, Verdict::Accept);
    }
}

#[test]
fn reference_acceptance_frequencies() {
    let ham = XZHamiltonian::bell(-1);
    let zeros = ProverStrategy::HonestWithState(StateVector::from_bits(&[0, 0]));
    let est = estimate_pacc(Variant::Posthoc, &ham, &zeros, 10_000, 3).unwrap();
    assert!((est.mean - 0.75).abs() <= 0.013, "{}", est.mean);
    let constant = ProverStrategy::Constant(ProverAnswer::zeros(2));
    let est = estimate_pacc(Variant::Main, &ham, &constant, 10_000, 4).unwrap();
    assert!((est.mean - 0.5).abs() <= 0.02, "{}", est.mean);
    let maximal = ProverStrategy::HonestWithState(phi_plus());
    let est = estimate_pacc(Variant::Main, &XZHamiltonian::bell(1), &maximal, 10_000, 5).unwrap();
    assert_eq!(est.mean, 0.0);
    assert_eq!(est.ci95_halfwidth, 0.0);
}

#[test]
fn exact_reference_values() {
    let bell = XZHamiltonian::bell(-1);
    assert!((exact_pacc(Variant::Main, &bell, &ProverStrategy::Honest).unwrap() - 1.0).abs() <= 1e-12);
    assert!((exact_pacc(Variant::Zk, &bell, &ProverStrategy::Honest).unwrap() - 1.0).abs() <= 1e-12);
    let maximal = ProverStrategy::HonestWithState(phi_plus());
    assert!(exact_pacc(Variant::Zk, &XZHamiltonian::bell(1), &maximal).unwrap().abs() <= 1e-12);
    let big = XZHamiltonian::random(4, &mut RandomSource::new(1));
    assert!(matches!(
        exact_pacc(Variant::Main, &big, &ProverStrategy::Honest),
        Err(Error::CapExceeded { .. })
    ));
}

#[test]
fn honest_zk_acceptance_matches_closed_form_in_sampling() {
    let ham = frustrated();
    let lambda = ham.ground_state().unwrap().lambda_min;
    let expected = 1.0 - lambda / 3.0;
    let est = estimate_pacc(Variant::Zk, &ham, &ProverStrategy::Honest, 20_000, 11).unwrap();
    assert!((est.mean - expected).abs() <= 3.0 * (expected * (1.0 - expected) / 20_000.0).sqrt());
}

#[test]
fn estimates_converge_to_exact_values() {
    let mut instances = vec![XZHamiltonian::bell(-1), XZHamiltonian::bell(1), frustrated()];
    instances.push(XZHamiltonian::random(3, &mut RandomSource::new(77)));
    let trials = 4_000;
    for ham in &instances {
        for strategy in strategies(ham.n_qubits, 8) {
            for variant in Variant::ALL {
                let exact = exact_pacc(variant, ham, &strategy).unwrap();
                let est = estimate_pacc(variant, ham, &strategy, trials, 21).unwrap();
                let p = exact.clamp(0.0, 1.0);
                let se = (p * (1.0 - p) / trials as f64).sqrt();
                assert!(
                    (est.mean - exact).abs() <= 3.0 * se + 1e-12,
                    "{variant:?} {}: {} vs {exact}",
                    strategy.label(),
                    est.mean
                );
            }
        }
    }
}

#[test]
fn estimates_are_bit_identical_per_seed() {
    let ham = frustrated();
    let a = estimate_pacc(Variant::Virtual1, &ham, &ProverStrategy::Honest, 3_000, 99).unwrap();
    let b = estimate_pacc(Variant::Virtual1, &ham, &ProverStrategy::Honest, 3_000, 99).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.ci95_halfwidth.to_bits(), b.ci95_halfwidth.to_bits());
    let r1 = run_protocol(Variant::VirtualZk, &ham, &ProverStrategy::Honest, &mut RandomSource::new(5)).unwrap();
    let r2 = run_protocol(Variant::VirtualZk, &ham, &ProverStrategy::Honest, &mut RandomSource::new(5)).unwrap();
    assert_eq!(r1, r2);
}

#[test]
fn verifier_decisions_follow_the_parity_rule() {
    // s = -1 on (1, 2): accept iff m'_1 = m'_2.
    let ham = XZHamiltonian::bell(-1);
    let key = CenterKey { h: 0, m: vec![1, 0], zk_pair: None };
    let answer = ProverAnswer { x: vec![1, 0], z: vec![1, 1] };
    let d = verifier_decide(&ham, &key, &answer, &mut RandomSource::new(0)).unwrap();
    assert_eq!(d.verdict, Verdict::Accept);
    let answer = ProverAnswer { x: vec![0, 0], z: vec![1, 1] };
    let d = verifier_decide(&ham, &key, &answer, &mut RandomSource::new(0)).unwrap();
    assert_eq!(d.verdict, Verdict::Reject);

    // ZK, s = +1 on the checked pair with corrected bits (0, 0): reject.
    let plus = XZHamiltonian::bell(1);
    let msg = ZkCenterMessage { h: 1, a: 1, b: 2, m_a: 1, m_b: 0 };
    let answer = ProverAnswer { x: vec![0, 0], z: vec![1, 0] };
    let d = decide_zk(&plus, &msg, &answer, &mut RandomSource::new(0)).unwrap();
    assert_eq!(d.verdict, Verdict::Reject);
}

#[test]
fn view_distribution_examples() {
    let ham = XZHamiltonian::bell(-1);
    let sim = view_distribution(ViewSource::Simulator, &ham, ViewMode::Exact).unwrap();
    let h = sim.marginal(|v| v.h);
    assert!((h.probability(&0) - 0.5).abs() <= 1e-12);
    let honest = view_distribution(ViewSource::VirtualZkHonest, &ham, ViewMode::Exact).unwrap();
    assert!(tvd(&honest, &sim).unwrap() <= 1e-9);
    let sampled =
        view_distribution(ViewSource::Simulator, &ham, ViewMode::Sampled { trials: 100_000, seed: 2 }).unwrap();
    assert!(tvd(&sampled, &sim).unwrap() <= 0.02);
}

#[test]
fn sweep_on_bell_reaches_but_never_beats_the_ceiling() {
    let ham = XZHamiltonian::bell(-1);
    let mut rng = RandomSource::new(12);
    let mut family = vec![ProverStrategy::Honest, ProverStrategy::Constant(ProverAnswer::zeros(2))];
    family.extend((0..20).map(|_| ProverStrategy::HonestWithState(StateVector::random(2, &mut rng))));
    for k in 0..10u8 {
        let bits = |b: u8| vec![b & 1, (b >> 1) & 1];
        family.push(ProverStrategy::ByproductFlip { x_mask: bits(k % 4), z_mask: bits((k / 4) % 4) });
    }
    let report = adversary_sweep(Variant::Main, &ham, &family, 1_000, 6).unwrap();
    assert!(!report.any_flagged);
    assert!(report.max_mean <= 1.0);
    assert_eq!(report.rows[0].estimate.mean, 1.0);
}

#[test]
fn no_instance_sweep_stays_below_one_minus_beta() {
    let ham = frustrated().with_promise(0.05, 0.2, PromiseLabel::No).unwrap();
    assert!(ham.ground_state().unwrap().lambda_min >= 0.2);
    let mut rng = RandomSource::new(13);
    let family = tcverify::analysis::standard_family(3, 20, &mut rng);
    let report = adversary_sweep(Variant::Main, &ham, &family, 2_000, 14).unwrap();
    assert!(report.max_lower <= 1.0 - 0.2, "{}", report.max_lower);
}

#[test]
fn zk_gap_is_at_least_promise_gap_over_pair_count() {
    let (alpha, beta) = (0.05, 0.2);
    let yes = XZHamiltonian::new(3, vec![XZTerm::new(1, 2, 1.0, -1)]).unwrap();
    let lambda_yes = yes.ground_state().unwrap().lambda_min;
    assert!(lambda_yes <= alpha);
    let no = frustrated();
    let pairs = all_pairs(3).len() as f64;
    let p_yes = exact_pacc(Variant::Zk, &yes, &ProverStrategy::Honest).unwrap();
    let p_no = exact_pacc(Variant::Zk, &no, &ProverStrategy::Honest).unwrap();
    assert!(p_yes - p_no >= (beta - alpha) / pairs - 1e-9);
}
