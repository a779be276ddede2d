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

//! Instance file format.
//!
//! A JSON document:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "n": 2,
//!   "terms": [ { "i": 1, "j": 2, "p": 1.0, "s": -1 } ],
//!   "alpha": 0.1,
//!   "beta": 0.3,
//!   "promise": "yes"
//! }
//! ```
//!
//! `alpha`, `beta` and `promise` are optional (`promise` defaults to
//! `"unknown"`). Qubits are numbered from 1. Parsing validates the instance
//! and reports every violated invariant with the term it occurs in;
//! weights are never renormalised.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{PromiseLabel, ValidationIssue, XZHamiltonian, XZTerm};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format_version: u32,
    pub n: usize,
    pub terms: Vec<TermRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default)]
    pub promise: PromiseLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub i: usize,
    pub j: usize,
    pub p: f64,
    pub s: i64,
}

impl From<&XZHamiltonian> for InstanceFile {
    fn from(ham: &XZHamiltonian) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            n: ham.n_qubits,
            terms: ham
                .terms
                .iter()
                .map(|t| TermRecord { i: t.i, j: t.j, p: t.p, s: t.s.into() })
                .collect(),
            alpha: ham.alpha,
            beta: ham.beta,
            promise: ham.promise,
        }
    }
}

impl InstanceFile {
    pub fn into_hamiltonian(self) -> Result<XZHamiltonian> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::InstanceFormat(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        // signs outside i8 cannot be stored; report them before validation
        let bad_signs: Vec<ValidationIssue> = self
            .terms
            .iter()
            .enumerate()
            .filter(|(_, t)| t.s != 1 && t.s != -1)
            .map(|(k, t)| ValidationIssue::BadSign { term: k + 1, s: t.s })
            .collect();
        let ham = XZHamiltonian {
            n_qubits: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| XZTerm::new(t.i, t.j, t.p, if t.s == 1 { 1 } else { -1 }))
                .collect(),
            alpha: self.alpha,
            beta: self.beta,
            promise: self.promise,
        };
        let mut issues = bad_signs;
        issues.extend(ham.validate());
        if issues.is_empty() {
            Ok(ham)
        } else {
            Err(Error::InvalidInstance(issues))
        }
    }
}

/// Parses and validates an instance file.
pub fn parse_instance(bytes: &[u8]) -> Result<XZHamiltonian> {
    let file: InstanceFile =
        serde_json::from_slice(bytes).map_err(|e| Error::InstanceFormat(e.to_string()))?;
    file.into_hamiltonian()
}

/// Canonical serialisation: pretty-printed JSON with a trailing newline.
pub fn serialize_instance(ham: &XZHamiltonian) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceFile::from(ham)).expect("instance serialises");
    s.push('\n');
    s
}
