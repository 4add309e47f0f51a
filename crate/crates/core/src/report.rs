// Copyright 2026 The ncqsi Authors
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

//! Number formatting and check reports shared by the verification suites and the CLI.

use serde::{Serialize, Serializer};

/// Scientific notation with 17 significant digits, enough to round-trip an `f64`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Serialize an `f64` as a JSON number with 17 significant digits; non-finite
/// values become `null`.
pub fn serialize_sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = serde_json::value::RawValue::from_string(sig17(*x))
        .map_err(|e| serde::ser::Error::custom(format!("unrepresentable number {x}: {e}")))?;
    raw.serialize(s)
}

/// One offending trial of a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub quantity: String,
    #[serde(serialize_with = "serialize_sig17")]
    pub magnitude: f64,
}

/// Result of a verification suite. `worst_violation` is the largest defect
/// observed over all checks, whether or not it exceeded its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub passed: bool,
    #[serde(serialize_with = "serialize_sig17")]
    pub worst_violation: f64,
    pub failures: Vec<Failure>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            trials: 0,
            passed: true,
            worst_violation: 0.0,
            failures: Vec::new(),
        }
    }

    /// Record a defect against its tolerance.
    pub fn check(&mut self, seed: u64, quantity: &str, defect: f64, tol: f64) {
        let defect = if defect.is_nan() {
            f64::INFINITY
        } else {
            defect
        };
        self.worst_violation = self.worst_violation.max(defect);
        if defect > tol {
            self.fail(seed, quantity, defect);
        }
    }

    /// Record a boolean condition; a failed condition has magnitude 1.
    pub fn require(&mut self, seed: u64, quantity: &str, ok: bool) {
        if !ok {
            self.fail(seed, quantity, 1.0);
        }
    }

    pub fn fail(&mut self, seed: u64, quantity: &str, magnitude: f64) {
        self.passed = false;
        self.failures.push(Failure {
            seed,
            quantity: quantity.to_string(),
            magnitude,
        });
    }

    /// Fold in the checks of another report (a sub-suite).
    pub fn absorb(&mut self, other: CheckReport) {
        self.worst_violation = self.worst_violation.max(other.worst_violation);
        self.passed &= other.passed;
        self.failures
            .extend(other.failures.into_iter().map(|mut f| {
                f.quantity = format!("{}/{}", other.name, f.quantity);
                f
            }));
    }
}
