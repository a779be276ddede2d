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

//! Sweep a family of cheating provers and compare against 1 - λ_min.
//!
//! The honest prover sits exactly on the ceiling, so its sampled lower
//! bound crosses it now and then. The exact value settles such flags.
//!
//! ```text
//! cargo run --release --example soundness_sweep
//! ```

use tcverify::analysis::{adversary_sweep, exact_pacc, standard_family};
use tcverify::{RandomSource, Variant, XZHamiltonian};

fn main() -> tcverify::Result<()> {
    let mut rng = RandomSource::new(99);
    for index in 0..3 {
        let ham = XZHamiltonian::random(3, &mut rng);
        let family = standard_family(3, 20, &mut rng);
        let report = adversary_sweep(Variant::Main, &ham, &family, 5_000, index)?;
        println!(
            "instance {index}: {} provers, ceiling {:.4}, best mean {:.4}, best lower bound {:.4}, flagged {}",
            report.rows.len(),
            report.ceiling,
            report.max_mean,
            report.max_lower,
            report.any_flagged
        );
        let (best, strategy) = report
            .rows
            .iter()
            .zip(&family)
            .max_by(|a, b| a.0.estimate.mean.total_cmp(&b.0.estimate.mean))
            .expect("family is nonempty");
        println!(
            "  strongest: {} with exact acceptance {:.4}",
            best.strategy,
            exact_pacc(Variant::Main, &ham, strategy)?
        );
    }
    Ok(())
}
