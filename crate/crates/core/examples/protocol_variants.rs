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

//! Run all six protocol variants against a few provers, exactly and by
//! sampling.
//!
//! ```text
//! cargo run --release --example protocol_variants
//! ```

use tcverify::analysis::{estimate_pacc, exact_pacc};
use tcverify::protocol::{run_protocol, ProverAnswer};
use tcverify::{ProverStrategy, RandomSource, StateVector, Variant, XZHamiltonian};

fn main() -> tcverify::Result<()> {
    let ham = XZHamiltonian::random(3, &mut RandomSource::new(17));
    let lambda = ham.ground_state()?.lambda_min;
    println!("instance with λ_min = {lambda:.6}");

    let provers = [
        ProverStrategy::Honest,
        ProverStrategy::HonestWithState(StateVector::from_bits(&[0, 1, 1])),
        ProverStrategy::ByproductFlip { x_mask: vec![1, 0, 0], z_mask: vec![0, 0, 0] },
        ProverStrategy::Constant(ProverAnswer::zeros(3)),
    ];
    println!("{:<12} {:<28} {:>8} {:>8} {:>8}", "variant", "prover", "exact", "sampled", "±95%");
    for variant in Variant::ALL {
        for prover in &provers {
            let exact = exact_pacc(variant, &ham, prover)?;
            let est = estimate_pacc(variant, &ham, prover, 20_000, 1)?;
            println!(
                "{:<12} {:<28} {exact:>8.4} {:>8.4} {:>8.4}",
                variant.name(),
                prover.label(),
                est.mean,
                est.ci95_halfwidth
            );
        }
    }

    let record = run_protocol(Variant::Main, &ham, &ProverStrategy::Honest, &mut RandomSource::new(3))?;
    assert_eq!(record.redecide(), Some(record.verdict));
    println!("one main-protocol transcript: {}", serde_json::to_string(&record)?);
    Ok(())
}
