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

//! Teleport a random qubit through a Bell pair and undo the byproduct.
//!
//! ```text
//! cargo run --example teleportation
//! ```

use tcverify::quantum::{make_bell_pairs, Gate};
use tcverify::{RandomSource, StateVector};

fn main() -> tcverify::Result<()> {
    let mut rng = RandomSource::new(2026);
    for round in 0..4 {
        let psi = StateVector::random(1, &mut rng);
        // Qubit 1 holds |ψ⟩, qubits 2 and 3 the Bell pair.
        let mut joint = psi.tensor(&make_bell_pairs(1));
        let (x, z) = joint.bell_measure(1, 2, &mut rng)?;

        joint.apply_gate(Gate::Cnot, &[1, 2])?;
        joint.apply_gate(Gate::H, &[1])?;
        if x == 1 {
            joint.apply_gate(Gate::X, &[3])?;
        }
        if z == 1 {
            joint.apply_gate(Gate::Z, &[3])?;
        }
        let base = 4 * z as usize + 2 * x as usize;
        let amps = joint.amplitudes();
        let received = StateVector::from_amplitudes(vec![amps[base], amps[base + 1]])?;
        println!("round {round}: byproduct (x={x}, z={z}), fidelity {:.12}", received.fidelity(&psi));
    }
    Ok(())
}
