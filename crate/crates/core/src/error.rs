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

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain shape: {0}")]
    InvalidShape(String),
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("factor index {index} out of range for a chain of {len} factors")]
    FactorOutOfRange { index: usize, len: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid filtration schedule: {0}")]
    InvalidSchedule(String),
    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("operator is not hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("invalid process: {0}")]
    InvalidProcess(String),
    #[error("process kind does not support this operation: {0}")]
    UnsupportedKind(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("increment forms disagree by {gap:e}; integrator is not a martingale")]
    NotMartingale { gap: f64 },
    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
