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

//! Build an instance, check it, and find its ground energy.
//!
//! ```text
//! cargo run --example ground_state
//! ```

use tcverify::hamiltonian::{PromiseLabel, XZTerm};
use tcverify::instance::{parse_instance, serialize_instance};
use tcverify::quantum::Gate;
use tcverify::{StateVector, XZHamiltonian};

fn main() -> tcverify::Result<()> {
    let ham = XZHamiltonian::new(
        3,
        vec![XZTerm::new(1, 2, 0.5, -1), XZTerm::new(1, 3, 0.3, 1), XZTerm::new(2, 3, 0.2, -1)],
    )?
    .with_promise(0.05, 0.2, PromiseLabel::No)?;

    let ground = ham.ground_state()?;
    println!("spectrum: {:?}", ham.spectrum()?);
    println!("λ_min = {:.6}, best acceptance 1 - λ_min = {:.6}", ground.lambda_min, 1.0 - ground.lambda_min);

    let mut ghz = StateVector::zero(3);
    ghz.apply_gate(Gate::H, &[1])?;
    ghz.apply_gate(Gate::Cnot, &[1, 2])?;
    ghz.apply_gate(Gate::Cnot, &[2, 3])?;
    let report = ham.energy(&ghz)?;
    println!("GHZ: energy {:.4}, predicted acceptance {:.4}", report.energy, report.p_acc_predicted);

    // Invalid instances are reported, never normalized.
    let bad = XZHamiltonian { terms: vec![XZTerm::new(1, 2, 0.9, -1)], ..ham.clone() };
    for issue in bad.validate() {
        println!("invalid: {issue}");
    }

    let text = serialize_instance(&ham);
    assert_eq!(parse_instance(text.as_bytes())?, ham);
    print!("{text}");
    Ok(())
}
