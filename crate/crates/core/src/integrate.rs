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

//! Riemann–Stieltjes sums `Σ f(t_{k-1}) ΔX(t_k)` and `Σ ΔX(t_k) f(t_{k-1})`,
//! the GNS operator sum `σ_θ`, dyadic refinement, and the closed-form limit
//! available on a finite chain.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::filtration::Model;
use crate::gns::{GnsBasis, GnsOperator};
use crate::process::Process;
use crate::report::sig17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `∫ dX f`, sums `ΔX(t_k) f(t_{k-1})`.
    Left,
    /// `∫ f dX`, sums `f(t_{k-1}) ΔX(t_k)`.
    Right,
}

impl Side {
    fn combine(self, f: &Element, dx: &Element) -> Element {
        match self {
            Side::Left => dx * f,
            Side::Right => f * dx,
        }
    }
}

/// `a = t_0 < t_1 < … < t_m = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    points: Vec<f64>,
}

/// How [`refine`] grows a partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefineMode {
    Dyadic,
    OnePoint(f64),
}

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPartition("need at least two points".into()));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidPartition("non-finite point".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition(format!(
                "points not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Partition { points })
    }

    pub fn trivial(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, b])
    }

    /// `m` equal subintervals of `[a, b]`.
    pub fn uniform(a: f64, b: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidPartition("zero subintervals".into()));
        }
        let mut pts: Vec<f64> = (0..m)
            .map(|k| a + (b - a) * (k as f64 / m as f64))
            .collect();
        pts.push(b);
        Self::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn a(&self) -> f64 {
        self.points[0]
    }

    pub fn b(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Number of subintervals `m`.
    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn mesh(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.points.binary_search_by(|p| p.total_cmp(&t)).is_ok()
    }

    /// Halve every subinterval.
    pub fn refine_dyadic(&self) -> Partition {
        let mut pts = Vec::with_capacity(2 * self.points.len() - 1);
        for w in self.points.windows(2) {
            pts.push(w[0]);
            pts.push(0.5 * (w[0] + w[1]));
        }
        pts.push(self.b());
        Partition { points: pts }
    }

    /// `θ ∪ {t}` for `t` strictly inside `(a, b)` and not already a point.
    pub fn refine_one_point(&self, t: f64) -> Result<Partition> {
        if !(t > self.a() && t < self.b()) {
            return Err(Error::InvalidPartition(format!(
                "refinement point {t} outside ({}, {})",
                self.a(),
                self.b()
            )));
        }
        match self.points.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(_) => Err(Error::InvalidPartition(format!(
                "refinement point {t} already in the partition"
            ))),
            Err(i) => {
                let mut pts = self.points.clone();
                pts.insert(i, t);
                Ok(Partition { points: pts })
            }
        }
    }

    /// Common refinement of two partitions of the same interval.
    pub fn union(&self, other: &Partition) -> Result<Partition> {
        if self.a() != other.a() || self.b() != other.b() {
            return Err(Error::InvalidPartition(
                "partitions cover different intervals".into(),
            ));
        }
        let mut pts: Vec<f64> = self.points.iter().chain(&other.points).copied().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Ok(Partition { points: pts })
    }

    /// Whether every point of `self` is also a point of `finer`.
    pub fn is_refined_by(&self, finer: &Partition) -> bool {
        self.points.iter().all(|&t| finer.contains(t))
    }
}

pub fn refine(theta: &Partition, mode: RefineMode) -> Result<Partition> {
    match mode {
        RefineMode::Dyadic => Ok(theta.refine_dyadic()),
        RefineMode::OnePoint(t) => theta.refine_one_point(t),
    }
}

fn check_interval(model: &Model, a: f64, b: f64) -> Result<()> {
    model.schedule().check_time(a)?;
    model.schedule().check_time(b)?;
    if a >= b {
        return Err(Error::InvalidPartition(format!(
            "empty interval [{a}, {b}]"
        )));
    }
    Ok(())
}

/// Sum over the subintervals `(t0, t1]` given by `intervals`. For a level-step
/// integrator only subintervals crossing a filtration jump contribute, since
/// `ΔX` vanishes identically inside a level.
fn sum_over<I>(model: &Model, f: &Process, x: &Process, side: Side, intervals: I) -> Result<Element>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let step = x.is_level_step();
    let mut acc = Element::zeros(model.shape());
    for (t0, t1) in intervals {
        if step && model.level_of(t0)? == model.level_of(t1)? {
            model.schedule().check_time(t1)?;
            continue;
        }
        let dx = &x.eval(model, t1)? - &x.eval(model, t0)?;
        let ft = f.eval(model, t0)?;
        acc = &acc + &side.combine(&ft, &dx);
    }
    Ok(acc)
}

pub fn integral_sum(
    model: &Model,
    theta: &Partition,
    f: &Process,
    x: &Process,
    side: Side,
) -> Result<Element> {
    check_interval(model, theta.a(), theta.b())?;
    sum_over(
        model,
        f,
        x,
        side,
        theta.points.windows(2).map(|w| (w[0], w[1])),
    )
}

/// `S_θ^r = Σ f(t_{k-1}) [X(t_k) - X(t_{k-1})]`.
pub fn right_sum(model: &Model, theta: &Partition, f: &Process, x: &Process) -> Result<Element> {
    integral_sum(model, theta, f, x, Side::Right)
}

/// `S_θ^l = Σ [X(t_k) - X(t_{k-1})] f(t_{k-1})`.
pub fn left_sum(model: &Model, theta: &Partition, f: &Process, x: &Process) -> Result<Element> {
    integral_sum(model, theta, f, x, Side::Left)
}

/// `σ_θ = Σ f(t_{k-1}) (P_{t_k} - P_{t_{k-1}})` as a GNS operator.
pub fn sigma_operator(
    model: &Model,
    basis: &GnsBasis,
    theta: &Partition,
    f: &Process,
) -> Result<GnsOperator> {
    check_interval(model, theta.a(), theta.b())?;
    let mut terms = Vec::new();
    for w in theta.points.windows(2) {
        let (l0, l1) = (model.level_of(w[0])?, model.level_of(w[1])?);
        if l0 != l1 {
            terms.push((f.eval(model, w[0])?, l0, l1));
        }
    }
    let mut sigma = GnsOperator::zeros(basis.dim());
    for (ft, l0, l1) in &terms {
        let inc = &basis.level_projection(*l1)? - &basis.level_projection(*l0)?;
        sigma = &sigma + &(&basis.left_multiplication(ft) * &inc);
    }
    Ok(sigma)
}

/// Limit of the integral sums on a finite chain: `Σ_{s_j ∈ (a, b]} f(s_j⁻) M_j`
/// (right) or `M_j f(s_j⁻)` (left), with `M_j = X(s_j) - X(s_j⁻)`.
pub fn oracle_integral(
    model: &Model,
    f: &Process,
    x: &Process,
    a: f64,
    b: f64,
    side: Side,
) -> Result<Element> {
    model.schedule().check_time(a)?;
    model.schedule().check_time(b)?;
    if !x.is_level_step() {
        return Err(Error::Precondition(format!(
            "integrator must be a martingale, got {}",
            x.kind_name()
        )));
    }
    let mut acc = Element::zeros(model.shape());
    for (_, s) in model.schedule().jumps_in(a, b) {
        let jump = &x.eval(model, s)? - &x.left_limit(model, s)?;
        let fl = f.left_limit(model, s)?;
        acc = &acc + &side.combine(&fl, &jump);
    }
    Ok(acc)
}

/// `t ↦ ∫_0^t` on a grid: `Z` for the right side, `Y` for the left.
pub fn integral_process(
    model: &Model,
    f: &Process,
    x: &Process,
    side: Side,
    grid: &[f64],
) -> Result<Vec<(f64, Element)>> {
    grid.iter()
        .map(|&t| {
            let v = if t == 0.0 {
                model.schedule().check_time(t)?;
                Element::zeros(model.shape())
            } else {
                oracle_integral(model, f, x, 0.0, t, side)?
            };
            Ok((t, v))
        })
        .collect()
}

/// `μ((a, b]) = ω(|X(b)|²) - ω(|X(a)|²)`, cross-checked against
/// `ω(|X(b) - X(a)|²)`; the two agree exactly when `X` is a martingale.
pub fn mu_increment(model: &Model, x: &Process, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a > b {
        return Err(Error::Precondition(format!("a = {a} exceeds b = {b}")));
    }
    let xa = x.eval(model, a)?;
    let xb = x.eval(model, b)?;
    let increment = model.norm_h(&(&xb - &xa)).powi(2);
    let second_moments = model.norm_h(&xb).powi(2) - model.norm_h(&xa).powi(2);
    let gap = (increment - second_moments).abs();
    if gap > tol * increment.abs().max(model.norm_h(&xb).powi(2)).max(1.0) {
        return Err(Error::NotMartingale { gap });
    }
    Ok(second_moments)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceOptions {
    pub tol_conv: f64,
    pub max_depth: usize,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions {
            tol_conv: 1e-9,
            max_depth: 24,
        }
    }
}

/// One dyadic level of the refinement engine. `successive_gap_h` compares the
/// sum at this depth with the sum one level deeper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthRecord {
    pub depth: usize,
    pub mesh: f64,
    pub points: u64,
    pub successive_gap_h: f64,
    pub gap_to_oracle_h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralResult {
    pub value: Element,
    pub side: Side,
    pub interval: (f64, f64),
    pub diagnostics: Vec<DepthRecord>,
    pub converged: bool,
}

impl IntegralResult {
    pub const CSV_HEADER: &'static str = "depth,mesh,points,successive_gap_H,gap_to_oracle_H";

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.diagnostics {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.depth,
                sig17(r.mesh),
                r.points,
                sig17(r.successive_gap_h),
                sig17(r.gap_to_oracle_h)
            )?;
        }
        Ok(())
    }
}

/// Point `k` of the uniform grid with `n` subintervals, matching repeated
/// midpoint refinement.
fn grid_point(a: f64, b: f64, k: u64, n: u64) -> f64 {
    if k == n {
        b
    } else {
        a + (b - a) * (k as f64 / n as f64)
    }
}

/// Integral sum over the dyadic partition of depth `depth`, touching only the
/// subintervals that contain a filtration jump.
pub fn dyadic_sum(
    model: &Model,
    f: &Process,
    x: &Process,
    a: f64,
    b: f64,
    depth: usize,
    side: Side,
) -> Result<Element> {
    check_interval(model, a, b)?;
    if !x.is_level_step() {
        return Err(Error::Precondition(format!(
            "dyadic engine needs a martingale integrator, got {}",
            x.kind_name()
        )));
    }
    if depth > 52 {
        return Err(Error::Precondition(format!(
            "dyadic depth {depth} exceeds 52"
        )));
    }
    let n = 1u64 << depth;
    let mut cells: Vec<u64> = Vec::new();
    for (_, s) in model.schedule().jumps_in(a, b) {
        let mut k = (((s - a) / (b - a)) * n as f64).ceil().clamp(1.0, n as f64) as u64;
        while k > 1 && grid_point(a, b, k - 1, n) >= s {
            k -= 1;
        }
        while k < n && grid_point(a, b, k, n) < s {
            k += 1;
        }
        if cells.last() != Some(&k) {
            cells.push(k);
        }
    }
    let intervals = cells
        .into_iter()
        .map(|k| (grid_point(a, b, k - 1, n), grid_point(a, b, k, n)));
    sum_over(model, f, x, side, intervals)
}

fn check_integrand(model: &Model, f: &Process, x: &Process, a: f64, b: f64) -> Result<()> {
    let mut grid: Vec<f64> = vec![0.0, a, b, model.horizon()];
    grid.extend_from_slice(model.schedule().jump_times());
    grid.extend(f.discontinuities(model));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mids: Vec<f64> = grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    grid.extend(mids);
    grid.sort_by(f64::total_cmp);

    let cx = x.certify(model, &grid)?;
    if !x.is_level_step() || !cx.martingale {
        return Err(Error::Precondition(
            "integrator is not a certified martingale".into(),
        ));
    }
    let cf = f.certify(model, &grid)?;
    let regular = matches!(
        f,
        Process::NormContinuousAdapted { .. } | Process::Constant { .. }
    ) || (cf.hermitian && cf.monotone);
    if !cf.adapted || !regular {
        return Err(Error::Precondition(format!(
            "integrand ({}) must be adapted and either monotone hermitian or norm-continuous",
            f.kind_name()
        )));
    }
    Ok(())
}

/// Dyadic refinement from `{a, b}` until the sum moves by at most `tol_conv`
/// in `‖·Ω‖_H` between consecutive depths, or `max_depth` is reached.
/// Non-convergence is reported through `converged = false`.
pub fn integrate(
    model: &Model,
    f: &Process,
    x: &Process,
    a: f64,
    b: f64,
    side: Side,
    opts: ConvergenceOptions,
) -> Result<IntegralResult> {
    check_interval(model, a, b)?;
    check_integrand(model, f, x, a, b)?;
    let oracle = oracle_integral(model, f, x, a, b, side)?;

    let mut diagnostics = Vec::new();
    let mut current = dyadic_sum(model, f, x, a, b, 0, side)?;
    let mut converged = false;
    for depth in 0..=opts.max_depth {
        let next = dyadic_sum(model, f, x, a, b, depth + 1, side)?;
        let successive = model.norm_h(&(&next - &current));
        diagnostics.push(DepthRecord {
            depth,
            mesh: (b - a) / (1u64 << depth) as f64,
            points: (1u64 << depth) + 1,
            successive_gap_h: successive,
            gap_to_oracle_h: model.norm_h(&(&current - &oracle)),
        });
        if successive <= opts.tol_conv {
            converged = true;
            break;
        }
        if depth < opts.max_depth {
            current = next;
        }
    }
    Ok(IntegralResult {
        value: current,
        side,
        interval: (a, b),
        diagnostics,
        converged,
    })
}
