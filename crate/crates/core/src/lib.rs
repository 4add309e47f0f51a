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

//! Quantum stochastic integrals `∫ f dX` and `∫ dX f` as Riemann–Stieltjes
//! limits in finite tensor-chain von Neumann algebras, together with
//! executable checks of the identities and estimates behind their existence.
//!
//! The algebra is a chain `M_{d_1} ⊗ … ⊗ M_{d_n}` with a faithful state ω
//! (normalized trace or a product of densities). A filtration reveals one
//! factor per jump time; martingales are `X(t) = E_t X_T`. Integral sums are
//! formed over partitions and refined dyadically; on a finite chain their
//! limit has a closed form that serves as an oracle.

pub mod algebra;
pub mod cli;
pub mod config;
pub mod error;
pub mod filtration;
pub mod gns;
pub mod integrate;
pub mod linalg;
pub mod process;
pub mod report;
pub mod verify;

pub use algebra::{ChainShape, Element, StateSpec, Tolerances};
pub use error::{Error, Result};
pub use filtration::{FiltrationSchedule, Model};
pub use gns::{GnsBasis, GnsOperator};
pub use integrate::{ConvergenceOptions, IntegralResult, Partition, Side};
pub use process::{PiecewiseLinear, Process, RampedTerm};
pub use report::CheckReport;
