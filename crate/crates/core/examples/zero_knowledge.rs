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

//! Compare the honest verifier's view in the zero-knowledge protocol with
//! the simulator's output.
//!
//! ```text
//! cargo run --release --example zero_knowledge
//! ```

use tcverify::analysis::{exact_pacc, sampled_tvd_threshold, tvd, view_distribution, ViewMode, ViewSource};
use tcverify::protocol::{all_pairs, zk_simulator};
use tcverify::{ProverStrategy, RandomSource, Variant, XZHamiltonian};

fn main() -> tcverify::Result<()> {
    let ham = XZHamiltonian::random(3, &mut RandomSource::new(5));

    let honest = view_distribution(ViewSource::VirtualZkHonest, &ham, ViewMode::Exact)?;
    let sim = view_distribution(ViewSource::Simulator, &ham, ViewMode::Exact)?;
    println!("exact: {} outcomes, TVD = {:.3e}", honest.len(), tvd(&honest, &sim)?);

    let trials = 200_000;
    let a = view_distribution(ViewSource::VirtualZkHonest, &ham, ViewMode::Sampled { trials, seed: 1 })?;
    let b = view_distribution(ViewSource::Simulator, &ham, ViewMode::Sampled { trials, seed: 2 })?;
    println!(
        "sampled: TVD = {:.4}, noise threshold {:.4}",
        tvd(&a, &b)?,
        sampled_tvd_threshold(&a, &b, trials)
    );

    let view = zk_simulator(&ham, &mut RandomSource::new(9))?;
    println!("one simulated view: {}", serde_json::to_string(&view)?);

    let lambda = ham.ground_state()?.lambda_min;
    let pairs = all_pairs(ham.n_qubits).len() as f64;
    println!(
        "honest ZK acceptance {:.6} = 1 - λ_min/C(N,2) = {:.6}",
        exact_pacc(Variant::Zk, &ham, &ProverStrategy::Honest)?,
        1.0 - lambda / pairs
    );
    Ok(())
}
