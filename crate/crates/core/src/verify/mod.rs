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

//! Named, seeded verification suites. Each suite runs the identities and
//! estimates behind the existence of the integrals on random or supplied
//! instances and returns a [`CheckReport`]. Trials run in parallel and are
//! merged in trial order, so reports are identical for identical inputs.

pub mod random;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{operator_norm, Element, Tolerances};
use crate::error::Result;
use crate::filtration::Model;
use crate::gns::{GnsBasis, GnsOperator};
use crate::integrate::{self, ConvergenceOptions, Partition, Side};
use crate::process::{PiecewiseLinear, Process, RampedTerm};
use crate::report::CheckReport;

/// Tolerances owned by the suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteTolerances {
    /// Equality tolerance handed to the math core.
    pub eq: f64,
    /// Eigenvalue slack for positivity checks.
    pub psd: f64,
    /// Relative tolerance for exact algebraic identities.
    pub identity: f64,
    /// Additive slack on the norm bound `‖σ_θ‖ ≤ c`.
    pub norm_slack: f64,
    /// Defect allowed in `E_s Z(t) = Z(s)`, relative to `max(1, ‖Z(t)‖_2)`.
    pub martingale: f64,
    pub tol_conv: f64,
    pub max_depth: usize,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        SuiteTolerances {
            eq: 1e-10,
            psd: 1e-10,
            identity: 1e-12,
            norm_slack: 1e-10,
            martingale: 1e-10,
            tol_conv: 1e-9,
            max_depth: 24,
        }
    }
}

impl SuiteTolerances {
    pub fn core(&self) -> Tolerances {
        Tolerances {
            eq: self.eq,
            psd: self.psd,
        }
    }

    pub fn convergence(&self) -> ConvergenceOptions {
        ConvergenceOptions {
            tol_conv: self.tol_conv,
            max_depth: self.max_depth,
        }
    }
}

/// Seed of trial `i` in a suite run with base seed `seed`. Base seeds are
/// spread out so that nearby base seeds share no trials.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(i as u64)
}

/// Run `trials` independent trials with seeds `trial_seed(seed, i)` and merge
/// their reports in trial order.
fn run_trials<F>(name: &str, trials: usize, seed: u64, trial: F) -> CheckReport
where
    F: Fn(u64, &mut CheckReport) + Sync,
{
    let parts: Vec<CheckReport> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            let mut r = CheckReport::new(name);
            trial(s, &mut r);
            r
        })
        .collect();
    let mut report = CheckReport::new(name);
    report.trials = trials;
    for p in parts {
        report.worst_violation = report.worst_violation.max(p.worst_violation);
        report.passed &= p.passed;
        report.failures.extend(p.failures);
    }
    report
}

/// Unwrap a fallible step, recording an error as a failure.
fn record<T>(report: &mut CheckReport, seed: u64, quantity: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            report.fail(seed, &format!("{quantity}: {e}"), f64::INFINITY);
            None
        }
    }
}

fn basis_or_fail(model: &Model, report: &mut CheckReport, seed: u64) -> Option<GnsBasis> {
    if let Err(e) = model.state().validate(model.shape(), model.tolerances().eq) {
        report.fail(seed, &format!("faithfulness: {e}"), f64::INFINITY);
        return None;
    }
    record(report, seed, "gns_basis", GnsBasis::new(model))
}

fn sample_grid(model: &Model, extra: &[f64]) -> Vec<f64> {
    let horizon = model.horizon();
    let mut grid: Vec<f64> = vec![0.0, horizon];
    grid.extend_from_slice(model.schedule().jump_times());
    grid.extend(
        extra
            .iter()
            .copied()
            .filter(|t| (0.0..=horizon).contains(t)),
    );
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mids: Vec<f64> = grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    grid.extend(mids);
    grid.sort_by(f64::total_cmp);
    grid
}

/// Coordinates distance `‖u - v‖` in the orthonormal GNS basis (= `‖·‖_H`).
fn coord_gap(basis: &GnsBasis, a: &nalgebra::DVector<num_complex::Complex64>, b: &Element) -> f64 {
    (a - basis.coords(b)).norm()
}

/// `P_t` is an increasing family of orthogonal projections with orthogonal
/// increments, fixing `Ω`, and realizing `E_t` on the GNS space.
pub fn suite_projection_family(
    model: &Model,
    trials: usize,
    seed: u64,
    tol: &SuiteTolerances,
) -> CheckReport {
    let name = "projection_family";
    let mut pre = CheckReport::new(name);
    let Some(basis) = basis_or_fail(model, &mut pre, seed) else {
        return pre;
    };
    let levels = model.shape().len();
    let projections: Vec<GnsOperator> = match (0..=levels)
        .map(|l| model.projection_matrix_level(&basis, l))
        .collect::<Result<_>>()
    {
        Ok(p) => p,
        Err(e) => {
            pre.fail(seed, &format!("projection_matrix: {e}"), f64::INFINITY);
            return pre;
        }
    };
    let horizon = model.horizon();
    let omega = basis.coords(&model.omega());

    let mut report = run_trials(name, trials, seed, |s, r| {
        let mut rng = random::rng(s);
        let mut times: Vec<f64> = (0..4)
            .map(|_| random::time(&mut rng, 0.0, horizon))
            .collect();
        times.sort_by(f64::total_cmp);
        let p: Vec<&GnsOperator> = times
            .iter()
            .map(|&t| &projections[model.level_of(t).expect("sampled in range")])
            .collect();
        for q in &p {
            r.check(s, "idempotent", (*q * *q).max_abs_diff(q), tol.eq);
            r.check(s, "self_adjoint", q.self_adjoint_defect(), tol.eq);
            r.check(s, "fixes_omega", (q.apply(&omega) - &omega).norm(), tol.eq);
        }
        r.check(
            s,
            "monotone",
            (-(p[3] - p[0]).min_eigenvalue()).max(0.0),
            tol.psd,
        );
        let inc_a = p[1] - p[0];
        let inc_b = p[3] - p[2];
        r.check(
            s,
            "increment_orthogonality",
            (&inc_a * &inc_b)
                .matrix()
                .iter()
                .fold(0.0, |m, z| m.max(z.norm())),
            tol.eq,
        );

        // P_t agrees with the slice map on a random vector
        let x = random::element(&mut rng, model.shape());
        let t = times[1];
        if let Some(ex) = record(r, s, "cond_expect", model.cond_expect(&x, t)) {
            let scale = basis.coords(&x).norm().max(1.0);
            r.check(
                s,
                "projection_is_cond_expect",
                coord_gap(&basis, &p[1].apply(&basis.coords(&x)), &ex) / scale,
                tol.eq,
            );
        }
        // self-adjointness through the inner product directly
        let y = random::element(&mut rng, model.shape());
        if let (Ok(px), Ok(py)) = (model.gns_project(&x, t), model.gns_project(&y, t)) {
            let lhs = model.inner(&px, &y).unwrap_or_default();
            let rhs = model.inner(&x, &py).unwrap_or_default();
            let scale = (model.norm_h(&x) * model.norm_h(&y)).max(1.0);
            r.check(
                s,
                "inner_product_symmetry",
                (lhs - rhs).norm() / scale,
                tol.eq,
            );
        }
    });
    report.absorb_prefix(pre);
    report
}

/// `(X(t_k) - X(t_{k-1}))Ω = (P_{t_k} - P_{t_{k-1}}) X(b)Ω` for random
/// martingales and partitions.
pub fn suite_increment_identity(
    model: &Model,
    trials: usize,
    seed: u64,
    tol: &SuiteTolerances,
) -> CheckReport {
    let name = "increment_identity";
    let mut pre = CheckReport::new(name);
    let Some(basis) = basis_or_fail(model, &mut pre, seed) else {
        return pre;
    };
    let levels = model.shape().len();
    let Some(projections) = record(
        &mut pre,
        seed,
        "projection_matrix",
        (0..=levels)
            .map(|l| model.projection_matrix_level(&basis, l))
            .collect::<Result<Vec<_>>>(),
    ) else {
        return pre;
    };
    let horizon = model.horizon();
    let mut report = run_trials(name, trials, seed, |s, r| {
        let mut rng = random::rng(s);
        let x = random::martingale(&mut rng, model);
        let theta = random::partition(&mut rng, 0.0, horizon, 8);
        let xb = x.eval(model, theta.b()).expect("in range");
        let xb_coords = basis.coords(&xb);
        let scale = xb_coords.norm().max(1.0);
        for w in theta.points().windows(2) {
            let (Ok(x1), Ok(x0)) = (x.eval(model, w[1]), x.eval(model, w[0])) else {
                r.fail(s, "eval", f64::INFINITY);
                return;
            };
            let l0 = model.level_of(w[0]).expect("in range");
            let l1 = model.level_of(w[1]).expect("in range");
            let inc = &projections[l1] - &projections[l0];
            let gap = coord_gap(&basis, &inc.apply(&xb_coords), &(&x1 - &x0));
            r.check(s, "increment_identity", gap / scale, tol.identity);
        }
    });
    report.absorb_prefix(pre);
    report
}

fn interval_grid(model: &Model, f: &Process) -> Vec<f64> {
    sample_grid(model, &f.discontinuities(model))
}

/// Oracle agreement of the dyadic engine: for a Lipschitz integrand every
/// depth satisfies `gap ≤ L·mesh·‖X(b)Ω‖_H`; for step integrands the sum at
/// `max_depth` matches the oracle to `tol_conv`.
fn check_oracle_agreement(
    model: &Model,
    f: &Process,
    x: &Process,
    side: Side,
    seed: u64,
    tol: &SuiteTolerances,
    report: &mut CheckReport,
) {
    let (a, b) = (0.0, model.horizon());
    let Some(result) = record(
        report,
        seed,
        "integrate",
        integrate::integrate(model, f, x, a, b, side, tol.convergence()),
    ) else {
        return;
    };
    let xb_norm = x
        .eval(model, b)
        .map(|v| model.norm_h(&v))
        .unwrap_or(f64::INFINITY);
    match f.lipschitz_bound() {
        Some(lip) => {
            for rec in &result.diagnostics {
                let bound = lip * rec.mesh * xb_norm;
                let defect = (rec.gap_to_oracle_h - bound).max(0.0);
                report.check(
                    seed,
                    "oracle_gap_bound",
                    defect,
                    tol.identity * xb_norm.max(1.0),
                );
            }
        }
        None => {
            let Some(oracle) = record(
                report,
                seed,
                "oracle",
                integrate::oracle_integral(model, f, x, a, b, side),
            ) else {
                return;
            };
            if let Some(deep) = record(
                report,
                seed,
                "dyadic_sum",
                integrate::dyadic_sum(model, f, x, a, b, tol.max_depth, side),
            ) {
                report.check(
                    seed,
                    "net_limit_gap",
                    model.norm_h(&(&deep - &oracle)),
                    tol.tol_conv,
                );
            }
            if result.converged {
                report.check(
                    seed,
                    "converged_gap",
                    model.norm_h(&(&result.value - &oracle)),
                    tol.tol_conv,
                );
            }
        }
    }
}

/// Monotone integrand: one-point refinements increase `σ_θ`, `‖σ_θ‖` is
/// bounded by `max(‖f(a)‖, ‖f(b)‖)`, `S_θΩ = σ_θ X(b)Ω`, and the refined sums
/// reach the oracle.
pub fn suite_thm_monotone(
    model: &Model,
    f: &Process,
    x: &Process,
    trials: usize,
    seed: u64,
    tol: &SuiteTolerances,
) -> CheckReport {
    let name = "thm_monotone";
    let mut pre = CheckReport::new(name);
    let Some(basis) = basis_or_fail(model, &mut pre, seed) else {
        return pre;
    };
    let grid = interval_grid(model, f);
    if let Some(cert) = record(&mut pre, seed, "certify_f", f.certify(model, &grid)) {
        pre.require(seed, "f_adapted", cert.adapted);
        pre.require(seed, "f_hermitian", cert.hermitian);
        pre.require(seed, "f_monotone", cert.monotone);
    }
    if let Some(cert) = record(&mut pre, seed, "certify_x", x.certify(model, &grid)) {
        pre.require(seed, "x_martingale", cert.martingale);
    }
    let (a, b) = (0.0, model.horizon());
    let c = match (f.eval(model, a), f.eval(model, b)) {
        (Ok(fa), Ok(fb)) => operator_norm(&fa).max(operator_norm(&fb)),
        _ => f64::INFINITY,
    };
    let xb = basis.coords(
        &x.eval(model, b)
            .unwrap_or_else(|_| Element::zeros(model.shape())),
    );
    let xb_scale = xb.norm().max(1.0);

    let mut report = run_trials(name, trials, seed, |s, r| {
        let mut rng = random::rng(s);
        let theta = random::partition(&mut rng, a, b, 6);
        let t_new = loop {
            let t = random::time(&mut rng, a, b);
            if t > a && !theta.contains(t) {
                break t;
            }
        };
        let Some(finer) = record(r, s, "refine", theta.refine_one_point(t_new)) else {
            return;
        };
        let (Some(sig), Some(sig_fine)) = (
            record(
                r,
                s,
                "sigma",
                integrate::sigma_operator(model, &basis, &theta, f),
            ),
            record(
                r,
                s,
                "sigma_refined",
                integrate::sigma_operator(model, &basis, &finer, f),
            ),
        ) else {
            return;
        };
        r.check(
            s,
            "sigma_self_adjoint",
            sig.self_adjoint_defect(),
            tol.eq * sig.max_abs().max(1.0),
        );
        let diff = &sig_fine - &sig;
        let scale = diff.max_abs().max(1.0);
        r.check(
            s,
            "refinement_increase",
            (-diff.min_eigenvalue() / scale).max(0.0),
            tol.psd,
        );
        r.check(
            s,
            "norm_bound",
            (sig.operator_norm() - c).max(0.0),
            tol.norm_slack,
        );
        if let Some(sum) = record(r, s, "right_sum", integrate::right_sum(model, &theta, f, x)) {
            r.check(
                s,
                "sigma_vector_identity",
                coord_gap(&basis, &sig.apply(&xb), &sum) / xb_scale,
                tol.identity,
            );
        }
    });
    check_oracle_agreement(model, f, x, Side::Right, seed, tol, &mut report);
    report.absorb_prefix(pre);
    report
}

/// Norm-continuous integrand: for each `ε`, partitions finer than
/// `δ = modulus_delta(ε / (2‖X(b)Ω‖_H))` and their refinements move the sum
/// by at most `ε/2`, and any two such partitions are `ε`-close.
pub fn suite_thm_continuous(
    model: &Model,
    f: &Process,
    x: &Process,
    eps_list: &[f64],
    trials: usize,
    seed: u64,
    tol: &SuiteTolerances,
) -> CheckReport {
    let name = "thm_continuous";
    let mut pre = CheckReport::new(name);
    let (a, b) = (0.0, model.horizon());
    let Some(xb) = record(&mut pre, seed, "eval_x", x.eval(model, b)) else {
        return pre;
    };
    let xb_norm = model.norm_h(&xb);
    let mut probes: Vec<f64> = model.schedule().jump_times().to_vec();
    probes.extend(f.discontinuities(model));

    let mut report = CheckReport::new(name);
    for (i, &eps) in eps_list.iter().enumerate() {
        let target = if xb_norm > 0.0 {
            eps / (2.0 * xb_norm)
        } else {
            f64::INFINITY
        };
        let delta = if target.is_finite() {
            record(
                &mut pre,
                seed,
                &format!("modulus_delta(eps={eps})"),
                f.modulus_delta(target),
            )
        } else {
            Some(f64::INFINITY)
        };
        let Some(delta) = delta else { continue };
        let sub_seed = seed.wrapping_add((i as u64) << 32);
        let part = run_trials(name, trials, sub_seed, |s, r| {
            let mut rng = random::rng(s);
            let coarse = random::partition_below_mesh(&mut rng, a, b, delta);
            let mut extra: Vec<f64> = (0..4).map(|_| random::time(&mut rng, a, b)).collect();
            let reach = if delta.is_finite() { delta } else { b - a };
            for &p in &probes {
                extra.push(p - reach * rng.random::<f64>());
                extra.push(p);
            }
            extra.retain(|&t| t > a && t < b);
            extra.sort_by(f64::total_cmp);
            extra.dedup();
            let mut pts = coarse.points().to_vec();
            pts.extend(extra);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let Some(fine) = record(r, s, "partition", Partition::new(pts)) else {
                return;
            };
            let (Some(s1), Some(s2)) = (
                record(
                    r,
                    s,
                    "right_sum",
                    integrate::right_sum(model, &coarse, f, x),
                ),
                record(
                    r,
                    s,
                    "right_sum_refined",
                    integrate::right_sum(model, &fine, f, x),
                ),
            ) else {
                return;
            };
            let gap = model.norm_h(&(&s2 - &s1));
            r.check(
                s,
                &format!("cauchy_refinement(eps={eps})"),
                (gap - eps / 2.0).max(0.0),
                tol.identity,
            );

            let other = random::partition_below_mesh(&mut rng, a, b, delta);
            if let Some(s3) = record(
                r,
                s,
                "right_sum_other",
                integrate::right_sum(model, &other, f, x),
            ) {
                let gap = model.norm_h(&(&s3 - &s1));
                r.check(
                    s,
                    &format!("cauchy_pair(eps={eps})"),
                    (gap - eps).max(0.0),
                    tol.identity,
                );
            }
        });
        report.trials += part.trials;
        report.absorb_prefix(part);
    }
    report.absorb_prefix(pre);
    report
}

/// Max over grid pairs `s ≤ t` of `‖E_s I(t) - I(s)‖_2 / max(1, ‖I(t)‖_2)`
/// for the integral process `I` on the given side.
pub fn integral_martingale_defect(
    model: &Model,
    f: &Process,
    x: &Process,
    side: Side,
    grid: &[f64],
) -> Result<f64> {
    let values = integrate::integral_process(model, f, x, side, grid)?;
    let mut worst: f64 = 0.0;
    for (j, (t, zt)) in values.iter().enumerate() {
        let scale = model.norm_h(zt).max(1.0);
        for (s, zs) in values.iter().take(j + 1) {
            debug_assert!(s <= t);
            let proj = model.cond_expect(zt, *s)?;
            worst = worst.max(model.norm_h(&(&proj - zs)) / scale);
        }
    }
    Ok(worst)
}

/// Tracial case: both integrals exist, the integral processes are
/// martingales, `S^l(f, X) = S^r(f*, X*)*`, and integral sums commute with
/// right multiplications (the commutant).
pub fn suite_thm_tracial(
    model: &Model,
    f: &Process,
    x: &Process,
    grid: &[f64],
    trials: usize,
    seed: u64,
    tol: &SuiteTolerances,
) -> CheckReport {
    let name = "thm_tracial";
    let mut pre = CheckReport::new(name);
    pre.require(seed, "tracial_state", model.state().is_tracial());
    let Some(basis) = basis_or_fail(model, &mut pre, seed) else {
        return pre;
    };
    for side in [Side::Right, Side::Left] {
        check_oracle_agreement(model, f, x, side, seed, tol, &mut pre);
        let label = match side {
            Side::Right => "martingale_Z",
            Side::Left => "martingale_Y",
        };
        if let Some(d) = record(
            &mut pre,
            seed,
            label,
            integral_martingale_defect(model, f, x, side, grid),
        ) {
            pre.check(seed, label, d, tol.martingale);
        }
    }
    let (a, b) = (0.0, model.horizon());
    // hermitian data: the two integrals are mutual adjoints
    let grid_h = interval_grid(model, f);
    let herm_f = f
        .certify(model, &grid_h)
        .map(|c| c.hermitian)
        .unwrap_or(false);
    let herm_x = x
        .certify(model, &grid_h)
        .map(|c| c.hermitian)
        .unwrap_or(false);
    if herm_f && herm_x {
        if let (Ok(l), Ok(r)) = (
            integrate::oracle_integral(model, f, x, a, b, Side::Left),
            integrate::oracle_integral(model, f, x, a, b, Side::Right),
        ) {
            pre.check(
                seed,
                "hermitian_mutual_adjoint",
                l.max_abs_diff(&r.adjoint()) / l.max_abs().max(1.0),
                tol.identity,
            );
        }
    }
    let f_adj = f.adjoint();
    let x_adj = x.adjoint();

    let mut report = run_trials(name, trials, seed, |s, r| {
        let mut rng = random::rng(s);
        let theta = random::partition(&mut rng, a, b, 6);
        let (Some(left), Some(right_adj)) = (
            record(r, s, "left_sum", integrate::left_sum(model, &theta, f, x)),
            record(
                r,
                s,
                "right_sum_adjoint",
                integrate::right_sum(model, &theta, &f_adj, &x_adj),
            ),
        ) else {
            return;
        };
        let scale = left.max_abs().max(1.0);
        r.check(
            s,
            "adjoint_entrywise",
            left.max_abs_diff(&right_adj.adjoint()) / scale,
            tol.identity,
        );
        let (n_l, n_r) = (model.norm_h(&left), model.norm_h(&right_adj));
        r.check(
            s,
            "adjoint_norm_2",
            (n_l - n_r).abs() / n_l.max(1.0),
            tol.identity,
        );

        if let Some(sum) = record(r, s, "right_sum", integrate::right_sum(model, &theta, f, x)) {
            let y = random::element(&mut rng, model.shape());
            let ls = basis.left_multiplication(&sum);
            let ry = basis.right_multiplication(&y);
            let comm = &(&ls * &ry) - &(&ry * &ls);
            let scale = (ls.max_abs() * ry.max_abs()).max(1.0);
            r.check(s, "commutant", comm.max_abs() / scale, tol.identity);
        }
    });
    report.absorb_prefix(pre);
    report
}

/// Spectral step integrand `f(t) = e([0, t])`: norm gap exactly one across
/// every spectral jump, projection values, nonnegative additive μ increments,
/// and the monotone integral still exists.
pub fn suite_remark2(
    model: &Model,
    generator: &Element,
    x: &Process,
    trials: usize,
    seed: u64,
    tol: &SuiteTolerances,
) -> CheckReport {
    let name = "remark2";
    let mut pre = CheckReport::new(name);
    let Some(f) = record(
        &mut pre,
        seed,
        "spectral_step",
        Process::spectral_step(model, generator.clone(), None),
    ) else {
        return pre;
    };
    let horizon = model.horizon();
    let jumps = f.discontinuities(model);
    pre.require(seed, "has_spectral_jump", !jumps.is_empty());

    if let Ok(xt) = x.eval(model, horizon) {
        if let (Some(mu), Ok(w)) = (
            record(
                &mut pre,
                seed,
                "mu_full_horizon",
                integrate::mu_increment(model, x, 0.0, horizon, tol.eq),
            ),
            model.state_value(&xt),
        ) {
            let second_moment = model.norm_h(&xt).powi(2) - w.norm_sqr();
            pre.check(
                seed,
                "mu_full_horizon",
                (mu - second_moment).abs() / second_moment.abs().max(1.0),
                tol.identity,
            );
        }
    }

    let mut report = run_trials(name, trials, seed, |s, r| {
        let mut rng = random::rng(s);
        // one random pair plus one pair forced to straddle a jump
        let mut pairs = Vec::new();
        let (u, v) = (
            random::time(&mut rng, 0.0, horizon),
            random::time(&mut rng, 0.0, horizon),
        );
        pairs.push((u.min(v), u.max(v)));
        if !jumps.is_empty() {
            let tau = jumps[rng.random_range(0..jumps.len())];
            let lo = random::time(&mut rng, 0.0, tau);
            let hi = random::time(&mut rng, tau, horizon);
            pairs.push((lo.min(tau), hi.max(tau)));
        }
        for (lo, hi) in pairs {
            if lo >= hi {
                continue;
            }
            let (Ok(f_lo), Ok(f_hi)) = (f.eval(model, lo), f.eval(model, hi)) else {
                r.fail(s, "eval", f64::INFINITY);
                return;
            };
            let gap = operator_norm(&(&f_hi - &f_lo));
            let straddles = jumps.iter().any(|&tau| lo < tau && tau <= hi);
            let expected = if straddles { 1.0 } else { 0.0 };
            r.check(s, "norm_gap", (gap - expected).abs(), tol.identity);
            for val in [&f_lo, &f_hi] {
                r.check(
                    s,
                    "projection_idempotent",
                    (val * val).max_abs_diff(val),
                    tol.eq,
                );
                r.check(s, "projection_self_adjoint", val.hermitian_defect(), tol.eq);
            }
        }
        let mut t: Vec<f64> = (0..3)
            .map(|_| random::time(&mut rng, 0.0, horizon))
            .collect();
        t.sort_by(f64::total_cmp);
        let mus = [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])].map(|(p, q)| {
            record(
                r,
                s,
                "mu_forms",
                integrate::mu_increment(model, x, p, q, tol.eq),
            )
        });
        if let [Some(ab), Some(bc), Some(ac)] = mus {
            r.check(
                s,
                "mu_nonnegative",
                (-ab).max(0.0).max((-bc).max(0.0)),
                tol.identity,
            );
            r.check(
                s,
                "mu_additive",
                (ab + bc - ac).abs() / ac.abs().max(1.0),
                tol.identity,
            );
        }
    });
    report.absorb_prefix(pre);
    report.absorb(suite_thm_monotone(model, &f, x, trials, seed, tol));
    report
}

impl CheckReport {
    /// Merge checks recorded under the same suite name.
    fn absorb_prefix(&mut self, other: CheckReport) {
        self.worst_violation = self.worst_violation.max(other.worst_violation);
        self.passed &= other.passed;
        self.failures.extend(other.failures);
    }
}

/// Norm-continuous integrand with a jump hidden behind a declared Lipschitz
/// constant of one: the Cauchy estimate must fail for it.
pub fn jump_integrand_control(model: &Model, before: f64) -> Result<Process> {
    let shape = model.shape();
    let start = 0.0;
    let tau = model.schedule().jump_time(1) - before;
    let profile = PiecewiseLinear::from_parts_unchecked(
        vec![(start, 0.0), (tau, 0.0), (tau, 1.0), (model.horizon(), 1.0)],
        1.0,
    );
    Ok(Process::NormContinuousAdapted {
        terms: vec![RampedTerm::new(start, Element::identity(shape), profile)],
    })
}
