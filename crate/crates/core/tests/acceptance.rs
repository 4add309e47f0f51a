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

//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::Command;

use ncqsi::algebra::{embed_factor, operator_norm, ChainShape, Element};
use ncqsi::filtration::{FiltrationSchedule, Model};
use ncqsi::gns::GnsBasis;
use ncqsi::integrate::{self, ConvergenceOptions, Side};
use ncqsi::linalg::{diag, pauli_z};
use ncqsi::process::{PiecewiseLinear, Process, RampedTerm};
use ncqsi::verify::{self, random, SuiteTolerances};

mod common;
use common::{canonical, random_model};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn criterion_increment_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, seed % 2 == 0);
        let x = random::martingale(&mut rng, &model);
        let theta = random::partition(&mut rng, 0.0, model.horizon(), 8);
        let basis = GnsBasis::new(&model).unwrap();
        let xb = basis.coords(&x.eval(&model, theta.b()).unwrap());
        let scale = xb.norm().max(1.0);
        for w in theta.points().windows(2) {
            let lhs = &x.eval(&model, w[1]).unwrap() - &x.eval(&model, w[0]).unwrap();
            let inc = &model.projection_matrix(&basis, w[1]).unwrap()
                - &model.projection_matrix(&basis, w[0]).unwrap();
            worst = worst.max((inc.apply(&xb) - basis.coords(&lhs)).norm() / scale);
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!("worst relative defect {worst:.3e} over 100 trials"),
    )
}

/// Criteria 2 and 3 share their random instances.
fn sigma_trials() -> (f64, f64) {
    let mut min_eig = f64::INFINITY;
    let mut norm_excess = f64::NEG_INFINITY;
    for seed in 0..100u64 {
        let mut rng = random::rng(1000 + seed);
        let model = random_model(&mut rng, seed % 2 == 1);
        let basis = GnsBasis::new(&model).unwrap();
        let f = random::monotone_process(&mut rng, &model, 3).unwrap();
        let (a, b) = (0.0, model.horizon());
        let theta = random::partition(&mut rng, a, b, 6);
        let t = loop {
            let t = random::time(&mut rng, a, b);
            if t > a && !theta.contains(t) {
                break t;
            }
        };
        let finer = theta.refine_one_point(t).unwrap();
        let sig = integrate::sigma_operator(&model, &basis, &theta, &f).unwrap();
        let sig_fine = integrate::sigma_operator(&model, &basis, &finer, &f).unwrap();
        min_eig = min_eig.min((&sig_fine - &sig).min_eigenvalue());
        let c = operator_norm(&f.eval(&model, a).unwrap())
            .max(operator_norm(&f.eval(&model, b).unwrap()));
        norm_excess = norm_excess
            .max(sig.operator_norm() - c)
            .max(sig_fine.operator_norm() - c);
    }
    (min_eig, norm_excess)
}

fn criterion_cauchy() -> Outcome {
    let (model, x) = canonical();
    let tol = SuiteTolerances::default();
    let a = embed_factor(&ncqsi::linalg::pauli_y(), 0, model.shape()).unwrap();
    let b = embed_factor(&pauli_z(), 0, model.shape()).unwrap();
    let f = Process::norm_continuous(
        &model,
        vec![
            RampedTerm::new(
                1.0,
                a,
                PiecewiseLinear::new(vec![(1.0, 0.0), (1.5, 1.0), (2.0, -0.5)]).unwrap(),
            ),
            RampedTerm::new(
                1.5,
                b,
                PiecewiseLinear::new(vec![(1.5, 0.0), (2.0, 2.0)]).unwrap(),
            ),
        ],
    )
    .unwrap();
    let eps = [0.3, 0.1, 0.03];
    let report = verify::suite_thm_continuous(&model, &f, &x, &eps, 100, 4242, &tol);
    let control = verify::jump_integrand_control(&model, 1e-3).unwrap();
    let negative = verify::suite_thm_continuous(&model, &control, &x, &eps, 100, 4242, &tol);
    Outcome::new(
        report.passed && !negative.passed,
        format!(
            "eps {eps:?}: {} failures over {} trials; step control violations {}",
            report.failures.len(),
            report.trials,
            negative.failures.len()
        ),
    )
}

fn criterion_oracle_convergence() -> Outcome {
    let (model, x) = canonical();
    let f = Process::norm_continuous(
        &model,
        vec![RampedTerm::new(
            0.0,
            Element::identity(model.shape()),
            PiecewiseLinear::identity(2.0),
        )],
    )
    .unwrap();
    let result = integrate::integrate(
        &model,
        &f,
        &x,
        0.0,
        2.0,
        Side::Right,
        ConvergenceOptions::default(),
    )
    .unwrap();
    let reached = result
        .diagnostics
        .iter()
        .find(|r| r.gap_to_oracle_h <= 1e-9)
        .map(|r| r.depth);
    let spacing = 1.0;
    let ratios: Vec<f64> = result
        .diagnostics
        .windows(2)
        .filter(|w| w[0].mesh < spacing && w[1].gap_to_oracle_h > 0.0)
        .map(|w| w[0].gap_to_oracle_h / w[1].gap_to_oracle_h)
        .collect();
    let ratios_ok = !ratios.is_empty() && ratios.iter().all(|r| (1.5..=2.5).contains(r));
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &r| {
            (l.min(r), h.max(r))
        });
    let last = result.diagnostics.last().unwrap();
    Outcome::new(
        reached.is_some_and(|d| d <= 24) && ratios_ok,
        format!(
            "gap <= 1e-9 reached at depth {reached:?} (gap at depth {} is {:.3e}); per-depth ratios in [{lo:.4}, {hi:.4}]",
            last.depth, last.gap_to_oracle_h
        ),
    )
}

fn criterion_martingale() -> Outcome {
    let mut worst = [0.0f64; 3];
    for seed in 0..30u64 {
        for (slot, (tracial, side)) in [
            (true, Side::Right),
            (false, Side::Right),
            (true, Side::Left),
        ]
        .into_iter()
        .enumerate()
        {
            let mut rng = random::rng(5000 + seed);
            let model = random_model(&mut rng, tracial);
            let f = random::norm_continuous_process(&mut rng, &model, 3).unwrap();
            let x = random::martingale(&mut rng, &model);
            let mut grid: Vec<f64> = (0..6)
                .map(|_| random::time(&mut rng, 0.0, model.horizon()))
                .collect();
            grid.extend_from_slice(model.schedule().jump_times());
            grid.extend([0.0, model.horizon()]);
            grid.sort_by(f64::total_cmp);
            let d = verify::integral_martingale_defect(&model, &f, &x, side, &grid).unwrap();
            worst[slot] = worst[slot].max(d);
        }
    }
    Outcome::new(
        worst.iter().all(|&d| d <= 1e-10),
        format!(
            "Z tracial {:.3e}, Z product {:.3e}, Y tracial {:.3e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn criterion_adjoint_symmetry() -> Outcome {
    let (mut norm_gap, mut entry_gap) = (0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let mut rng = random::rng(7000 + seed);
        let model = random_model(&mut rng, true);
        let f = random::norm_continuous_process(&mut rng, &model, 2).unwrap();
        let x = random::martingale(&mut rng, &model);
        let theta = random::partition(&mut rng, 0.0, model.horizon(), 8);
        let left = integrate::left_sum(&model, &theta, &f, &x).unwrap();
        let right = integrate::right_sum(&model, &theta, &f.adjoint(), &x.adjoint()).unwrap();
        let n = model.norm_h(&left);
        norm_gap = norm_gap.max((n - model.norm_h(&right)).abs() / n.max(1.0));
        entry_gap = entry_gap.max(left.max_abs_diff(&right.adjoint()) / left.max_abs().max(1.0));
    }
    Outcome::new(
        norm_gap <= 1e-12 && entry_gap <= 1e-12,
        format!("norm gap {norm_gap:.3e}, entrywise gap {entry_gap:.3e}"),
    )
}

fn criterion_remark2() -> Outcome {
    let shape = ChainShape::qubits(2);
    let model = Model::trace(shape, FiltrationSchedule::new(vec![1.0, 2.0], 3.0).unwrap()).unwrap();
    let x = canonical().1;
    let generator = embed_factor(&diag(&[1.5, 2.5]), 0, model.shape()).unwrap();
    let f = Process::spectral_step(&model, generator.clone(), None).unwrap();
    let mut gap_defect: f64 = 0.0;
    for tau in [1.5, 2.5] {
        for h in [0.25, 1e-3, 1e-9] {
            let gap =
                operator_norm(&(&f.eval(&model, tau).unwrap() - &f.eval(&model, tau - h).unwrap()));
            gap_defect = gap_defect.max((gap - 1.0).abs());
        }
    }
    let tol = SuiteTolerances::default();
    let monotone = verify::suite_thm_monotone(&model, &f, &x, 50, 99, &tol);
    let mut rng = random::rng(31);
    let mut mu_defect: f64 = 0.0;
    let mut mu_min = f64::INFINITY;
    for _ in 0..100 {
        let mut t: Vec<f64> = (0..3).map(|_| random::time(&mut rng, 0.0, 3.0)).collect();
        t.sort_by(f64::total_cmp);
        let mu = |a, b| integrate::mu_increment(&model, &x, a, b, tol.eq).unwrap();
        let (ab, bc, ac) = (mu(t[0], t[1]), mu(t[1], t[2]), mu(t[0], t[2]));
        mu_min = mu_min.min(ab).min(bc);
        mu_defect = mu_defect.max((ab + bc - ac).abs());
    }
    let suite = verify::suite_remark2(&model, &generator, &x, 50, 99, &tol);
    Outcome::new(
        gap_defect <= 1e-12 && monotone.passed && mu_min >= -1e-12 && mu_defect <= 1e-12 && suite.passed,
        format!(
            "norm gap defect {gap_defect:.3e}; thm_monotone {}; min mu {mu_min:.3e}; additivity {mu_defect:.3e}",
            if monotone.passed { "passed" } else { "failed" }
        ),
    )
}

fn criterion_commutant() -> Outcome {
    let (model, x) = canonical();
    let basis = GnsBasis::new(&model).unwrap();
    let mut rng = random::rng(77);
    let f = random::norm_continuous_process(&mut rng, &model, 3).unwrap();
    let theta = random::partition(&mut rng, 0.0, model.horizon(), 10);
    let s = integrate::right_sum(&model, &theta, &f, &x).unwrap();
    let ls = basis.left_multiplication(&s);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let y = random::element(&mut rng, model.shape());
        let ry = basis.right_multiplication(&y);
        let comm = &(&ls * &ry) - &(&ry * &ls);
        worst = worst.max(comm.max_abs() / (ls.max_abs() * ry.max_abs()).max(1.0));
    }
    Outcome::new(
        worst <= 1e-12,
        format!("worst commutator {worst:.3e} over 50 multipliers"),
    )
}

fn criterion_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/default.json");
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_ncqsi"))
            .args(["verify", "--config", config, "--out"])
            .arg(&out)
            .args(["--seed", "123"])
            .env("NCQSI_THREADS", threads)
            .output()
            .unwrap()
            .status;
        (status.code(), std::fs::read(out).unwrap_or_default())
    };
    let (c1, a) = run("a.json", "4");
    let (c2, b) = run("b.json", "4");
    let (c3, c) = run("c.json", "1");
    Outcome::new(
        !a.is_empty() && a == b && a == c && c1 == c2 && c2 == c3,
        format!("{} bytes, exit codes {c1:?} {c2:?} {c3:?}", a.len()),
    )
}

fn main() {
    let (min_eig, norm_excess) = sigma_trials();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 increment identity", criterion_increment_identity()),
        (
            "2 sigma-net monotonicity",
            Outcome::new(
                min_eig >= -1e-10,
                format!("min eigenvalue of refinement increase {min_eig:.3e}"),
            ),
        ),
        (
            "3 norm bound",
            Outcome::new(
                norm_excess <= 1e-10,
                format!("max of |sigma| - c is {norm_excess:.3e}"),
            ),
        ),
        ("4 Cauchy estimate", criterion_cauchy()),
        ("5 oracle convergence", criterion_oracle_convergence()),
        ("6 martingale property", criterion_martingale()),
        ("7 tracial adjoint symmetry", criterion_adjoint_symmetry()),
        ("8 spectral step", criterion_remark2()),
        ("9 commutant", criterion_commutant()),
        ("10 determinism", criterion_determinism()),
    ];
    let mut failed = 0;
    for (name, outcome) in &criteria {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
