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

//! Seeded random instances: hermitian matrices as `g + g*`, PSD as `g* g`,
//! densities as normalized `g* g + 10⁻³·1`, with `g` having entries uniform
//! in the complex unit square.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{embed_prefix, ChainShape, Element, StateSpec};
use crate::error::Result;
use crate::filtration::Model;
use crate::integrate::Partition;
use crate::linalg::Matrix;
use crate::process::{PiecewiseLinear, Process, RampedTerm};

pub type TrialRng = ChaCha8Rng;

const DENSITY_FLOOR: f64 = 1e-3;

pub fn rng(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_square(rng: &mut TrialRng) -> Complex64 {
    Complex64::new(rng.random::<f64>(), rng.random::<f64>())
}

pub fn matrix(rng: &mut TrialRng, d: usize) -> Matrix {
    Matrix::from_fn(d, d, |_, _| unit_square(rng))
}

pub fn hermitian(rng: &mut TrialRng, d: usize) -> Matrix {
    let g = matrix(rng, d);
    &g + g.adjoint()
}

pub fn psd(rng: &mut TrialRng, d: usize) -> Matrix {
    let g = matrix(rng, d);
    g.adjoint() * g
}

pub fn density(rng: &mut TrialRng, d: usize) -> Matrix {
    let m = psd(rng, d) + Matrix::identity(d, d).scale(DENSITY_FLOOR);
    let tr = m.trace().re;
    let mut rho = m.map(|z| z / tr);
    // exact hermitian symmetry
    rho = (&rho + rho.adjoint()).scale(0.5);
    rho
}

pub fn product_state(rng: &mut TrialRng, shape: &ChainShape) -> StateSpec {
    StateSpec::ProductDensities(
        shape
            .factor_dims()
            .iter()
            .map(|&d| density(rng, d))
            .collect(),
    )
}

pub fn element(rng: &mut TrialRng, shape: &ChainShape) -> Element {
    Element::from_matrix(shape, matrix(rng, shape.dim())).expect("dimension matches")
}

pub fn hermitian_element(rng: &mut TrialRng, shape: &ChainShape) -> Element {
    Element::from_matrix(shape, hermitian(rng, shape.dim())).expect("dimension matches")
}

/// Random element of `A_level`.
pub fn element_in_level(rng: &mut TrialRng, shape: &ChainShape, level: usize) -> Element {
    embed_prefix(&matrix(rng, shape.prefix_dim(level)), level, shape).expect("prefix dimension")
}

pub fn hermitian_in_level(rng: &mut TrialRng, shape: &ChainShape, level: usize) -> Element {
    embed_prefix(&hermitian(rng, shape.prefix_dim(level)), level, shape).expect("prefix dimension")
}

pub fn psd_in_level(rng: &mut TrialRng, shape: &ChainShape, level: usize) -> Element {
    embed_prefix(&psd(rng, shape.prefix_dim(level)), level, shape).expect("prefix dimension")
}

pub fn time(rng: &mut TrialRng, a: f64, b: f64) -> f64 {
    a + (b - a) * rng.random::<f64>()
}

/// Partition of `[a, b]` with up to `max_interior` random interior points.
pub fn partition(rng: &mut TrialRng, a: f64, b: f64, max_interior: usize) -> Partition {
    let count = rng.random_range(0..=max_interior);
    let mut pts: Vec<f64> = (0..count)
        .map(|_| time(rng, a, b))
        .filter(|&t| t > a && t < b)
        .collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Partition::new(pts).expect("sorted distinct points")
}

/// Partition of `[a, b]` whose mesh is strictly below `delta`.
pub fn partition_below_mesh(rng: &mut TrialRng, a: f64, b: f64, delta: f64) -> Partition {
    if delta.is_nan() || delta >= b - a {
        return partition(rng, a, b, 4);
    }
    let mut pts = vec![a];
    let mut t = a;
    loop {
        t += delta * (0.3 + 0.65 * rng.random::<f64>());
        if t >= b {
            break;
        }
        pts.push(t);
    }
    pts.push(b);
    Partition::new(pts).expect("increasing points")
}

pub fn martingale(rng: &mut TrialRng, model: &Model) -> Process {
    Process::martingale(element(rng, model.shape()))
}

fn start_and_level(rng: &mut TrialRng, model: &Model) -> (f64, usize) {
    let s = time(rng, 0.0, model.horizon());
    let level = model.level_of(s).expect("time in range");
    (s, level)
}

/// Increasing hermitian adapted process with `terms` PSD ramps.
pub fn monotone_process(rng: &mut TrialRng, model: &Model, terms: usize) -> Result<Process> {
    let shape = model.shape();
    let base = Element::scalar(shape, Complex64::new(2.0 * rng.random::<f64>() - 1.0, 0.0));
    let mut increments = Vec::with_capacity(terms);
    for _ in 0..terms {
        let (s, level) = start_and_level(rng, model);
        let w1 = 0.05 + 0.5 * rng.random::<f64>();
        let w2 = w1 + 0.05 + 0.5 * rng.random::<f64>();
        let mid = rng.random::<f64>();
        let ramp = PiecewiseLinear::new(vec![(s, 0.0), (s + w1, mid), (s + w2, 1.0)])?;
        increments.push(RampedTerm::new(s, psd_in_level(rng, shape, level), ramp));
    }
    Process::monotone(model, base, increments)
}

/// Norm-continuous adapted process with `terms` Lipschitz profiles.
pub fn norm_continuous_process(rng: &mut TrialRng, model: &Model, terms: usize) -> Result<Process> {
    let shape = model.shape();
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let (s, level) = start_and_level(rng, model);
        let mut knots = vec![(s, 0.0)];
        let mut t = s;
        for _ in 0..3 {
            t += 0.1 + 0.6 * rng.random::<f64>();
            knots.push((t, 2.0 * rng.random::<f64>() - 1.0));
        }
        let profile = PiecewiseLinear::new(knots)?;
        out.push(RampedTerm::new(
            s,
            element_in_level(rng, shape, level),
            profile,
        ));
    }
    Process::norm_continuous(model, out)
}
