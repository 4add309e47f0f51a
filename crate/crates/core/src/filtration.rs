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

//! Step filtrations on the tensor chain: `A_t` is the first `level(t)` factors
//! tensored with identities, `E_t` is the slice map against the state's tail
//! density, and `P_t` is `E_t` read as an operator on the GNS space.

use serde::{Deserialize, Serialize};

use crate::algebra::{ChainShape, Element, StateSpec, Tolerances};
use crate::error::{Error, Result};
use crate::gns::{GnsBasis, GnsOperator};
use crate::linalg::{self, Matrix};

/// Jump times `0 < s_1 < … < s_n ≤ T`. Factor `j` is revealed at `s_j`, so
/// `level(s_j) = j` and the filtration is right-continuous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationSchedule {
    jump_times: Vec<f64>,
    horizon: f64,
}

impl FiltrationSchedule {
    pub fn new(jump_times: Vec<f64>, horizon: f64) -> Result<Self> {
        let sched = FiltrationSchedule {
            jump_times,
            horizon,
        };
        sched.validate()?;
        Ok(sched)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.jump_times;
        if s.is_empty() {
            return Err(Error::InvalidSchedule("no jump times".into()));
        }
        if s.iter().any(|t| !t.is_finite()) || !self.horizon.is_finite() {
            return Err(Error::InvalidSchedule("non-finite time".into()));
        }
        if s[0] <= 0.0 {
            return Err(Error::InvalidSchedule(format!(
                "first jump time {} must be positive",
                s[0]
            )));
        }
        if let Some(w) = s.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSchedule(format!(
                "jump times not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        let last = *s.last().unwrap();
        if self.horizon < last {
            return Err(Error::InvalidSchedule(format!(
                "horizon {} precedes last jump {last}",
                self.horizon
            )));
        }
        Ok(())
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of levels above the trivial one (the chain length).
    pub fn levels(&self) -> usize {
        self.jump_times.len()
    }

    /// `s_j` for `j` in `1..=n`.
    pub fn jump_time(&self, level: usize) -> f64 {
        self.jump_times[level - 1]
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// `#{j : s_j ≤ t}`.
    pub fn level_of(&self, t: f64) -> Result<usize> {
        self.check_time(t)?;
        Ok(self.jump_times.partition_point(|&s| s <= t))
    }

    /// `#{j : s_j < t}`, the level seen just before `t`.
    pub fn level_before(&self, t: f64) -> Result<usize> {
        self.check_time(t)?;
        Ok(self.jump_times.partition_point(|&s| s < t))
    }

    /// Jumps `(j, s_j)` with `a < s_j ≤ b`.
    pub fn jumps_in(&self, a: f64, b: f64) -> Vec<(usize, f64)> {
        self.jump_times
            .iter()
            .enumerate()
            .filter(|(_, &s)| a < s && s <= b)
            .map(|(i, &s)| (i + 1, s))
            .collect()
    }
}

/// A chain algebra with its state and filtration: everything needed to
/// evaluate `ω`, `E_t` and `P_t`.
#[derive(Debug, Clone)]
pub struct Model {
    shape: ChainShape,
    state: StateSpec,
    schedule: FiltrationSchedule,
    tolerances: Tolerances,
    /// `tails[k]` is the density of factors `k..n`.
    tails: Vec<Matrix>,
}

impl Model {
    pub fn new(shape: ChainShape, state: StateSpec, schedule: FiltrationSchedule) -> Result<Self> {
        let tol = Tolerances::default();
        state.validate(&shape, tol.eq)?;
        Self::new_unchecked(shape, state, schedule)
    }

    pub fn trace(shape: ChainShape, schedule: FiltrationSchedule) -> Result<Self> {
        Self::new(shape, StateSpec::Trace, schedule)
    }

    /// Checks only structural compatibility; the state may be non-faithful.
    /// Verification suites use this to build negative controls.
    pub fn new_unchecked(
        shape: ChainShape,
        state: StateSpec,
        schedule: FiltrationSchedule,
    ) -> Result<Self> {
        schedule.validate()?;
        if schedule.levels() != shape.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} jump times for a chain of {} factors",
                schedule.levels(),
                shape.len()
            )));
        }
        if let StateSpec::ProductDensities(rhos) = &state {
            let dims: Vec<usize> = rhos.iter().map(|r| r.nrows()).collect();
            if dims != shape.factor_dims() || rhos.iter().any(|r| !r.is_square()) {
                return Err(Error::ShapeMismatch {
                    expected: shape.factor_dims().to_vec(),
                    found: dims,
                });
            }
        }
        let tails = (0..=shape.len())
            .map(|k| state.tail_density(&shape, k))
            .collect();
        Ok(Model {
            shape,
            state,
            schedule,
            tolerances: Tolerances::default(),
            tails,
        })
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn shape(&self) -> &ChainShape {
        &self.shape
    }

    pub fn state(&self) -> &StateSpec {
        &self.state
    }

    pub fn schedule(&self) -> &FiltrationSchedule {
        &self.schedule
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn horizon(&self) -> f64 {
        self.schedule.horizon()
    }

    pub fn level_of(&self, t: f64) -> Result<usize> {
        self.schedule.level_of(t)
    }

    pub fn omega(&self) -> Element {
        Element::omega(&self.shape)
    }

    pub fn state_value(&self, x: &Element) -> Result<num_complex::Complex64> {
        crate::algebra::state_value(x, &self.state)
    }

    pub fn inner(&self, x: &Element, y: &Element) -> Result<num_complex::Complex64> {
        crate::algebra::gns_inner(x, y, &self.state)
    }

    /// `‖xΩ‖_H`.
    pub fn norm_h(&self, x: &Element) -> f64 {
        crate::algebra::gns_norm(x, &self.state).expect("element belongs to the model chain")
    }

    fn check_shape(&self, x: &Element) -> Result<()> {
        if x.shape() != &self.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape.factor_dims().to_vec(),
                found: x.shape().factor_dims().to_vec(),
            });
        }
        Ok(())
    }

    /// Conditional expectation onto the first `level` factors.
    pub fn cond_expect_level(&self, x: &Element, level: usize) -> Result<Element> {
        self.check_shape(x)?;
        if level > self.shape.len() {
            return Err(Error::FactorOutOfRange {
                index: level,
                len: self.shape.len(),
            });
        }
        if level == self.shape.len() {
            return Ok(x.clone());
        }
        let da = self.shape.prefix_dim(level);
        let db = self.shape.suffix_dim(level);
        let rho = &self.tails[level];
        let m = x.matrix();
        // y[a, a'] = Σ_{b, b'} x[(a, b), (a', b')] ρ[b', b]
        let y = Matrix::from_fn(da, da, |a, a2| {
            let mut acc = linalg::ZERO;
            for b in 0..db {
                for b2 in 0..db {
                    acc += m[(a * db + b, a2 * db + b2)] * rho[(b2, b)];
                }
            }
            acc
        });
        Element::from_matrix(&self.shape, linalg::kron(&y, &Matrix::identity(db, db)))
    }

    /// `E_t x`.
    pub fn cond_expect(&self, x: &Element, t: f64) -> Result<Element> {
        let level = self.level_of(t)?;
        self.cond_expect_level(x, level)
    }

    /// `P_t (xΩ) = (E_t x)Ω`.
    pub fn gns_project(&self, v: &Element, t: f64) -> Result<Element> {
        self.cond_expect(v, t)
    }

    /// Whether `x` lies in `A_level` (fixed by the conditional expectation).
    pub fn in_level(&self, x: &Element, level: usize, tol: f64) -> Result<bool> {
        Ok(self.cond_expect_level(x, level)?.approx_eq(x, tol))
    }

    /// Matrix of `P_t` in the orthonormal GNS basis.
    pub fn projection_matrix(&self, basis: &GnsBasis, t: f64) -> Result<GnsOperator> {
        let level = self.level_of(t)?;
        self.projection_matrix_level(basis, level)
    }

    pub fn projection_matrix_level(&self, basis: &GnsBasis, level: usize) -> Result<GnsOperator> {
        basis.level_projection(level)
    }
}
