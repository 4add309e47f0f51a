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

//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use ncqsi::algebra::{embed_factor, product_element, ChainShape, StateSpec};
use ncqsi::filtration::{FiltrationSchedule, Model};
use ncqsi::linalg::{pauli_x, pauli_z};
use ncqsi::process::Process;
use ncqsi::verify::random;
use rand::Rng;

const CHAINS: [&[usize]; 4] = [&[2, 2], &[2, 3], &[3, 2], &[2, 2, 2]];

/// Random chain, schedule and (trace or product) state for a trial seed.
pub fn random_model(rng: &mut random::TrialRng, tracial: bool) -> Model {
    let dims = CHAINS[rng.random_range(0..CHAINS.len())].to_vec();
    let shape = ChainShape::new(dims).unwrap();
    let mut t = 0.0;
    let jumps: Vec<f64> = (0..shape.len())
        .map(|_| {
            t += 0.2 + rng.random::<f64>();
            t
        })
        .collect();
    let horizon = t + 0.5 * rng.random::<f64>();
    let schedule = FiltrationSchedule::new(jumps, horizon).unwrap();
    let state = if tracial {
        StateSpec::Trace
    } else {
        random::product_state(rng, &shape)
    };
    Model::new(shape, state, schedule).unwrap()
}

pub fn canonical() -> (Model, Process) {
    let shape = ChainShape::qubits(2);
    let model = Model::trace(shape, FiltrationSchedule::new(vec![1.0, 2.0], 2.0).unwrap()).unwrap();
    let terminal = embed_factor(&pauli_x(), 0, model.shape()).unwrap()
        + product_element(&[pauli_z(), pauli_x()], model.shape()).unwrap();
    (model, Process::martingale(terminal))
}
