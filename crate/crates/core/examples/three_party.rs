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

//! Center, prover and verifier as separate threads talking over loopback
//! TCP, compared with the in-process runner.
//!
//! ```text
//! cargo run --release --example three_party
//! ```
//!
//! The same roles run as separate processes with `tcverify party --role ...`.

use std::time::Duration;

use tcverify::analysis::exact_pacc;
use tcverify::net::run_local_network;
use tcverify::{ProverStrategy, StateVector, Variant, XZHamiltonian};

fn main() -> tcverify::Result<()> {
    let ham = XZHamiltonian::bell(-1);
    let prover = ProverStrategy::HonestWithState(StateVector::from_bits(&[0, 0]));
    let sessions = 500;
    let (summary, log) = run_local_network(&ham, &prover, false, sessions, 7, Duration::from_secs(10))?;
    println!(
        "networked: {}/{} accepted ({:.3}); in-process exact {:.3}",
        summary.accepts,
        summary.sessions,
        summary.accepts as f64 / summary.sessions as f64,
        exact_pacc(Variant::Main, &ham, &prover)?
    );
    println!("first verifier log line: {}", serde_json::to_string(&log[0])?);

    let (summary, log) = run_local_network(&ham, &ProverStrategy::Honest, true, 100, 8, Duration::from_secs(10))?;
    println!("zero-knowledge mode: {}/{} accepted", summary.accepts, summary.sessions);
    println!("the ZK verifier only ever logs: {}", serde_json::to_string(&log[0])?);
    Ok(())
}
