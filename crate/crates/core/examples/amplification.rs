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

//! Parallel repetition: separate a p = 0.75 prover from a p = 0.5 prover.
//!
//! ```text
//! cargo run --release --example amplification
//! ```

use tcverify::analysis::{exact_pacc, min_accepts, parallel_repetition};
use tcverify::quantum::Gate;
use tcverify::{ProverStrategy, StateVector, Variant, XZHamiltonian};

fn main() -> tcverify::Result<()> {
    let ham = XZHamiltonian::bell(-1);
    let strong = ProverStrategy::HonestWithState(StateVector::from_bits(&[0, 0]));
    let mut zero_plus = StateVector::from_bits(&[0, 0]);
    zero_plus.apply_gate(Gate::H, &[2])?;
    let weak = ProverStrategy::HonestWithState(zero_plus);
    println!(
        "single run: strong {:.3}, weak {:.3}",
        exact_pacc(Variant::Main, &ham, &strong)?,
        exact_pacc(Variant::Main, &ham, &weak)?
    );

    let threshold = 0.6;
    for k in [1, 5, 10, 25, 50, 100] {
        let s = parallel_repetition(&ham, &strong, k, threshold, 5_000, 1)?;
        let w = parallel_repetition(&ham, &weak, k, threshold, 5_000, 2)?;
        println!(
            "k = {k:>3} (need {:>2} accepts): strong {:.4}, weak {:.4}",
            min_accepts(k, threshold),
            s.mean,
            w.mean
        );
    }
    Ok(())
}
