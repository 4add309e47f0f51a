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

//! Adapted processes `f` and martingales `X` on a [`Model`].

use serde::Serialize;

use crate::algebra::{operator_norm, psd_check, Element};
use crate::error::{Error, Result};
use crate::filtration::Model;
use crate::linalg;

/// Piecewise-linear real function given by knots `(t, value)`, extended by
/// constants outside the knot range. The Lipschitz constant is carried with
/// the table so modulus-of-continuity bounds are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
    lipschitz: f64,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidProcess("empty ramp table".into()));
        }
        if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidProcess("non-finite ramp knot".into()));
        }
        if let Some(w) = knots.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidProcess(format!(
                "ramp knot times not strictly increasing at {} -> {}",
                w[0].0, w[1].0
            )));
        }
        let lipschitz = knots
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max);
        Ok(PiecewiseLinear { knots, lipschitz })
    }

    /// A table with a declared Lipschitz constant, which must dominate the slopes.
    pub fn with_lipschitz(knots: Vec<(f64, f64)>, declared: f64) -> Result<Self> {
        let mut p = Self::new(knots)?;
        if declared.is_nan() || declared < p.lipschitz {
            return Err(Error::InvalidProcess(format!(
                "declared Lipschitz constant {declared} is below the table slope {}",
                p.lipschitz
            )));
        }
        p.lipschitz = declared;
        Ok(p)
    }

    /// No validation: repeated times encode jumps (right-continuous) and the
    /// Lipschitz constant is taken as given. Used to build negative controls.
    pub fn from_parts_unchecked(knots: Vec<(f64, f64)>, lipschitz: f64) -> Self {
        PiecewiseLinear { knots, lipschitz }
    }

    /// `t ↦ t` on `[0, horizon]`.
    pub fn identity(horizon: f64) -> Self {
        Self::new(vec![(0.0, 0.0), (horizon, horizon)]).expect("horizon is positive")
    }

    /// `0` up to `start`, then slope `1/width` up to `1`.
    pub fn unit_ramp(start: f64, width: f64) -> Result<Self> {
        Self::new(vec![(start, 0.0), (start + width, 1.0)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Interpolate on the segment starting at knot `i`.
    fn segment(&self, i: usize, t: f64) -> f64 {
        let (t0, v0) = self.knots[i];
        let (t1, v1) = self.knots[i + 1];
        v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t < k[0].0 {
            return k[0].1;
        }
        // last knot with time ≤ t
        let i = k.partition_point(|&(s, _)| s <= t) - 1;
        if i + 1 == k.len() {
            k[i].1
        } else {
            self.segment(i, t)
        }
    }

    /// `lim_{u↑t}`; differs from [`eval`](Self::eval) only at repeated knots.
    pub fn left_limit(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= k[0].0 {
            return k[0].1;
        }
        // last knot with time < t
        let i = k.partition_point(|&(s, _)| s < t) - 1;
        if i + 1 == k.len() {
            k[i].1
        } else {
            self.segment(i, t)
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.knots.windows(2).all(|w| w[1].1 >= w[0].1)
    }

    pub fn value_range(&self) -> (f64, f64) {
        self.knots
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Times where the table has a repeated knot (a jump).
    pub fn jump_times(&self) -> Vec<f64> {
        self.knots
            .windows(2)
            .filter(|w| w[0].0 == w[1].0 && w[0].1 != w[1].1)
            .map(|w| w[0].0)
            .collect()
    }

    /// `inf {t : value(t) ≥ level}` for a nondecreasing table; `-∞` if the
    /// level is met from the start and `None` if it is never met.
    pub fn first_reach(&self, level: f64) -> Option<f64> {
        let k = &self.knots;
        if k[0].1 >= level {
            return Some(f64::NEG_INFINITY);
        }
        for w in k.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if v1 >= level {
                if t1 == t0 {
                    return Some(t0);
                }
                return Some(t0 + (level - v0) * ((t1 - t0) / (v1 - v0)));
            }
        }
        None
    }
}

/// A term `h(t)·a` switched on after `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct RampedTerm {
    pub start: f64,
    pub element: Element,
    pub ramp: PiecewiseLinear,
}

impl RampedTerm {
    pub fn new(start: f64, element: Element, ramp: PiecewiseLinear) -> Self {
        RampedTerm {
            start,
            element,
            ramp,
        }
    }
}

/// One eigenspace of a spectral step generator and the time it switches on.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLevel {
    pub eigenvalue: f64,
    pub projection: Element,
    /// `inf {t : φ(t) ≥ eigenvalue}`; `-∞` if always on, `None` if never.
    pub onset: Option<f64>,
}

/// `f(t) = Σ_{λ ≤ φ(t)} e_λ`, the spectral projection of a hermitian generator
/// below a moving threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralStep {
    generator: Element,
    threshold: PiecewiseLinear,
    levels: Vec<SpectralLevel>,
}

impl SpectralStep {
    pub fn generator(&self) -> &Element {
        &self.generator
    }

    pub fn threshold(&self) -> &PiecewiseLinear {
        &self.threshold
    }

    pub fn levels(&self) -> &[SpectralLevel] {
        &self.levels
    }

    fn sum_where(&self, include: impl Fn(f64) -> bool) -> Element {
        let mut acc = Element::zeros(self.generator.shape());
        for lvl in &self.levels {
            if lvl.onset.is_some_and(&include) {
                acc = &acc + &lvl.projection;
            }
        }
        acc
    }

    pub fn eval(&self, t: f64) -> Element {
        self.sum_where(|onset| onset <= t)
    }

    pub fn left_limit(&self, t: f64) -> Element {
        self.sum_where(|onset| onset < t)
    }

    /// Onset times inside `(0, horizon]`.
    pub fn jump_times(&self, horizon: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .levels
            .iter()
            .filter_map(|l| l.onset)
            .filter(|&t| t > 0.0 && t <= horizon)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Process {
    /// `X(t) = E_t X_T`.
    MartingaleFromTerminal {
        terminal: Element,
    },
    /// `f(t) = base + Σ h_j(t) g_j` with PSD `g_j` and nondecreasing ramps.
    MonotoneAdapted {
        base: Element,
        increments: Vec<RampedTerm>,
    },
    /// `f(t) = Σ h_j(t) a_j` with Lipschitz profiles.
    NormContinuousAdapted {
        terms: Vec<RampedTerm>,
    },
    SpectralStep(SpectralStep),
    Constant {
        value: Element,
    },
}

/// Outcome of [`Process::certify`] on a sample grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub adapted: bool,
    pub hermitian: bool,
    /// Nondecreasing: `f(t) - f(s) ⪰ 0` for `s < t`.
    pub monotone: bool,
    pub martingale: bool,
}

impl Process {
    pub fn martingale(terminal: Element) -> Self {
        Process::MartingaleFromTerminal { terminal }
    }

    pub fn constant(value: Element) -> Self {
        Process::Constant { value }
    }

    pub fn monotone(model: &Model, base: Element, increments: Vec<RampedTerm>) -> Result<Self> {
        let tol = model.tolerances();
        check_shape(model, &base)?;
        if !base.is_hermitian(tol.eq) {
            return Err(Error::InvalidProcess(
                "monotone base is not hermitian".into(),
            ));
        }
        if !model.in_level(&base, 0, tol.eq)? {
            return Err(Error::InvalidProcess(
                "monotone base must lie in A_0 (a real multiple of 1)".into(),
            ));
        }
        for (j, term) in increments.iter().enumerate() {
            check_term(model, term, j)?;
            if !term.element.is_hermitian(tol.eq) || !psd_check(&term.element, tol.psd)? {
                return Err(Error::InvalidProcess(format!(
                    "increment {j} is not hermitian positive semidefinite"
                )));
            }
            let (lo, hi) = term.ramp.value_range();
            if !term.ramp.is_nondecreasing() || lo < 0.0 || hi > 1.0 {
                return Err(Error::InvalidProcess(format!(
                    "ramp {j} must be nondecreasing with values in [0, 1]"
                )));
            }
        }
        Ok(Process::MonotoneAdapted { base, increments })
    }

    pub fn norm_continuous(model: &Model, terms: Vec<RampedTerm>) -> Result<Self> {
        for (j, term) in terms.iter().enumerate() {
            check_term(model, term, j)?;
        }
        Ok(Process::NormContinuousAdapted { terms })
    }

    /// Spectral step process of a hermitian generator in `A_{s_1}`. The
    /// threshold defaults to `φ(t) = t`, giving `f(t) = e([0, t])` for a
    /// generator with nonnegative spectrum.
    pub fn spectral_step(
        model: &Model,
        generator: Element,
        threshold: Option<PiecewiseLinear>,
    ) -> Result<Self> {
        let tol = model.tolerances();
        check_shape(model, &generator)?;
        if !generator.is_hermitian(tol.eq) {
            return Err(Error::NotHermitian {
                defect: generator.hermitian_defect(),
            });
        }
        let first = model.schedule().jump_time(1);
        if !model.in_level(&generator, 1, tol.eq)? {
            return Err(Error::InvalidProcess(
                "spectral step generator must lie in A_{s_1}".into(),
            ));
        }
        let threshold = threshold.unwrap_or_else(|| PiecewiseLinear::identity(model.horizon()));
        if !threshold.is_nondecreasing() {
            return Err(Error::InvalidProcess(
                "threshold map must be nondecreasing".into(),
            ));
        }
        let cluster = tol.eq * generator.max_abs().max(1.0);
        let levels: Vec<SpectralLevel> = linalg::spectral_projections(generator.matrix(), cluster)
            .into_iter()
            .map(|(eigenvalue, p)| SpectralLevel {
                eigenvalue,
                projection: Element::from_matrix(generator.shape(), p)
                    .expect("projection has chain dimension"),
                onset: threshold.first_reach(eigenvalue),
            })
            .collect();
        // before s_1 the value must be 0 or 1
        let early: Vec<Option<f64>> = levels
            .iter()
            .map(|l| l.onset.filter(|&t| t < first))
            .collect();
        let any_early = early.iter().any(Option::is_some);
        if any_early {
            let all_same = early.iter().all(|o| *o == early[0]);
            if !all_same {
                return Err(Error::InvalidProcess(format!(
                    "spectral step is not adapted: a proper projection switches on before s_1 = {first}"
                )));
            }
        }
        Ok(Process::SpectralStep(SpectralStep {
            generator,
            threshold,
            levels,
        }))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Process::MartingaleFromTerminal { .. } => "martingale_from_terminal",
            Process::MonotoneAdapted { .. } => "monotone_adapted",
            Process::NormContinuousAdapted { .. } => "norm_continuous_adapted",
            Process::SpectralStep(_) => "spectral_step",
            Process::Constant { .. } => "constant",
        }
    }

    pub fn eval(&self, model: &Model, t: f64) -> Result<Element> {
        model.schedule().check_time(t)?;
        Ok(match self {
            Process::MartingaleFromTerminal { terminal } => model.cond_expect(terminal, t)?,
            Process::MonotoneAdapted { base, increments } => {
                ramped_sum(base.clone(), increments, |r| r.eval(t))
            }
            Process::NormContinuousAdapted { terms } => {
                ramped_sum(Element::zeros(model.shape()), terms, |r| r.eval(t))
            }
            Process::SpectralStep(s) => s.eval(t),
            Process::Constant { value } => value.clone(),
        })
    }

    /// `lim_{u↑t} f(u)` for `0 < t ≤ T`.
    pub fn left_limit(&self, model: &Model, t: f64) -> Result<Element> {
        model.schedule().check_time(t)?;
        if t <= 0.0 {
            return Err(Error::Precondition("left limit requested at t = 0".into()));
        }
        Ok(match self {
            Process::MartingaleFromTerminal { terminal } => {
                model.cond_expect_level(terminal, model.schedule().level_before(t)?)?
            }
            Process::MonotoneAdapted { base, increments } => {
                ramped_sum(base.clone(), increments, |r| r.left_limit(t))
            }
            Process::NormContinuousAdapted { terms } => {
                ramped_sum(Element::zeros(model.shape()), terms, |r| r.left_limit(t))
            }
            Process::SpectralStep(s) => s.left_limit(t),
            Process::Constant { value } => value.clone(),
        })
    }

    /// The process `t ↦ f(t)*`.
    pub fn adjoint(&self) -> Process {
        let adj_terms = |terms: &[RampedTerm]| {
            terms
                .iter()
                .map(|t| RampedTerm::new(t.start, t.element.adjoint(), t.ramp.clone()))
                .collect()
        };
        match self {
            Process::MartingaleFromTerminal { terminal } => Process::MartingaleFromTerminal {
                terminal: terminal.adjoint(),
            },
            Process::MonotoneAdapted { base, increments } => Process::MonotoneAdapted {
                base: base.adjoint(),
                increments: adj_terms(increments),
            },
            Process::NormContinuousAdapted { terms } => Process::NormContinuousAdapted {
                terms: adj_terms(terms),
            },
            Process::SpectralStep(s) => Process::SpectralStep(s.clone()),
            Process::Constant { value } => Process::Constant {
                value: value.adjoint(),
            },
        }
    }

    /// Values are constant between filtration jumps (martingales and constants).
    pub fn is_level_step(&self) -> bool {
        matches!(
            self,
            Process::MartingaleFromTerminal { .. } | Process::Constant { .. }
        )
    }

    /// `Σ_j L_j ‖a_j‖`, a Lipschitz constant in operator norm, when one is known.
    pub fn lipschitz_bound(&self) -> Option<f64> {
        let sum = |terms: &[RampedTerm]| {
            terms
                .iter()
                .map(|t| t.ramp.lipschitz() * operator_norm(&t.element))
                .sum()
        };
        match self {
            Process::MonotoneAdapted { increments, .. } => Some(sum(increments)),
            Process::NormContinuousAdapted { terms } => Some(sum(terms)),
            Process::Constant { .. } => Some(0.0),
            Process::MartingaleFromTerminal { .. } | Process::SpectralStep(_) => None,
        }
    }

    /// Times in `(0, T]` where the process may jump.
    pub fn discontinuities(&self, model: &Model) -> Vec<f64> {
        let horizon = model.horizon();
        let ramp_jumps = |terms: &[RampedTerm]| {
            let mut v: Vec<f64> = terms
                .iter()
                .flat_map(|t| t.ramp.jump_times())
                .filter(|&t| t > 0.0 && t <= horizon)
                .collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        match self {
            Process::MartingaleFromTerminal { .. } => model.schedule().jump_times().to_vec(),
            Process::MonotoneAdapted { increments, .. } => ramp_jumps(increments),
            Process::NormContinuousAdapted { terms } => ramp_jumps(terms),
            Process::SpectralStep(s) => s.jump_times(horizon),
            Process::Constant { .. } => Vec::new(),
        }
    }

    /// `δ = eps / Σ_j L_j ‖a_j‖`, so that `|t' - t''| ≤ δ` implies
    /// `‖f(t') - f(t'')‖ ≤ eps`. Infinite when the process is constant.
    pub fn modulus_delta(&self, eps: f64) -> Result<f64> {
        let Process::NormContinuousAdapted { .. } = self else {
            return Err(Error::UnsupportedKind(format!(
                "modulus of continuity needs a norm-continuous process, got {}",
                self.kind_name()
            )));
        };
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::Precondition(format!(
                "eps must be positive, got {eps}"
            )));
        }
        let bound = self.lipschitz_bound().unwrap_or(0.0);
        Ok(if bound > 0.0 {
            eps / bound
        } else {
            f64::INFINITY
        })
    }

    pub fn certify(&self, model: &Model, grid: &[f64]) -> Result<Certificate> {
        let tol = model.tolerances();
        let values: Vec<Element> = grid
            .iter()
            .map(|&t| self.eval(model, t))
            .collect::<Result<_>>()?;
        let mut cert = Certificate {
            adapted: true,
            hermitian: true,
            monotone: true,
            martingale: true,
        };
        for (i, (&t, v)) in grid.iter().zip(&values).enumerate() {
            cert.adapted &= model.cond_expect(v, t)?.approx_eq(v, tol.eq);
            cert.hermitian &= v.is_hermitian(tol.eq);
            for (&s, u) in grid.iter().zip(&values).take(i) {
                let (early, late, s_time) = if s <= t { (u, v, s) } else { (v, u, t) };
                if cert.martingale {
                    cert.martingale &= model.cond_expect(late, s_time)?.approx_eq(early, tol.eq);
                }
                if cert.monotone {
                    let diff = late - early;
                    cert.monotone &= diff.is_hermitian(tol.eq) && psd_check(&diff, tol.psd)?;
                }
            }
        }
        Ok(cert)
    }
}

fn check_shape(model: &Model, x: &Element) -> Result<()> {
    if x.shape() != model.shape() {
        return Err(Error::ShapeMismatch {
            expected: model.shape().factor_dims().to_vec(),
            found: x.shape().factor_dims().to_vec(),
        });
    }
    Ok(())
}

fn check_term(model: &Model, term: &RampedTerm, j: usize) -> Result<()> {
    check_shape(model, &term.element)?;
    let level = model.level_of(term.start).map_err(|_| {
        Error::InvalidProcess(format!("term {j} starts outside [0, T] at {}", term.start))
    })?;
    if !model.in_level(&term.element, level, model.tolerances().eq)? {
        return Err(Error::InvalidProcess(format!(
            "term {j} is not in A_{{{}}} (level {level})",
            term.start
        )));
    }
    let r = &term.ramp;
    let silent_before = r
        .knots()
        .iter()
        .filter(|(t, _)| *t <= term.start)
        .all(|&(_, v)| v == 0.0);
    if r.eval(term.start) != 0.0 || !silent_before {
        return Err(Error::InvalidProcess(format!(
            "profile {j} must vanish for t ≤ {}",
            term.start
        )));
    }
    Ok(())
}

fn ramped_sum(
    init: Element,
    terms: &[RampedTerm],
    weight: impl Fn(&PiecewiseLinear) -> f64,
) -> Element {
    terms.iter().fold(init, |acc, term| {
        let w = weight(&term.ramp);
        if w == 0.0 {
            acc
        } else {
            &acc + &term.element.scale_real(w)
        }
    })
}
