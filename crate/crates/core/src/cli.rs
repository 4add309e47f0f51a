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

//! Command implementations behind the `ncqsi` binary. Each command returns
//! its process exit code: 0 on success, 1 when a property fails, 2 on a
//! usage or configuration error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::algebra::{embed_factor, operator_norm, product_element, ChainShape, Element};
use crate::config::{Config, Experiment, Prepared, Suite};
use crate::error::{Error, Result};
use crate::filtration::{FiltrationSchedule, Model};
use crate::integrate::{self, Side};
use crate::linalg::{diag, pauli_x, pauli_z};
use crate::process::Process;
use crate::report::{sig17, CheckReport};
use crate::verify::{self, SuiteTolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "NCQSI_THREADS";

/// Size the global thread pool from `NCQSI_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Config(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn prepare(config_path: &Path) -> Result<Prepared> {
    Config::load(config_path)?.prepare()
}

/// Run every suite of a prepared experiment in order.
pub fn run_suites(prep: &Prepared, suites: &[Suite]) -> Vec<CheckReport> {
    let (m, seed, tol) = (&prep.model, prep.seed, &prep.tolerances);
    suites
        .iter()
        .map(|suite| match suite {
            Suite::ProjectionFamily { trials } => {
                verify::suite_projection_family(m, *trials, seed, tol)
            }
            Suite::IncrementIdentity { trials } => {
                verify::suite_increment_identity(m, *trials, seed, tol)
            }
            Suite::ThmMonotone { f, x, trials } => {
                verify::suite_thm_monotone(m, f, x, *trials, seed, tol)
            }
            Suite::ThmContinuous { f, x, eps, trials } => {
                verify::suite_thm_continuous(m, f, x, eps, *trials, seed, tol)
            }
            Suite::ThmTracial { f, x, grid, trials } => {
                verify::suite_thm_tracial(m, f, x, grid, *trials, seed, tol)
            }
            Suite::Remark2 {
                generator,
                x,
                trials,
            } => verify::suite_remark2(m, generator, x, *trials, seed, tol),
        })
        .collect()
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()
}

/// `verify --config F --out F [--seed N]`
pub fn cmd_verify(config_path: &Path, out_path: &Path, seed: Option<u64>) -> i32 {
    let mut prep = match prepare(config_path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(s) = seed {
        prep.seed = s;
    }
    let Experiment::Suites(suites) = &prep.experiment else {
        eprintln!("error: config describes a convergence run; use `converge`");
        return EXIT_USAGE;
    };
    let reports = run_suites(&prep, suites);
    let written = write_file(out_path, |w| {
        serde_json::to_writer_pretty(&mut *w, &reports)?;
        writeln!(w)
    });
    if let Err(e) = written {
        eprintln!("error: cannot write {}: {e}", out_path.display());
        return EXIT_USAGE;
    }
    for r in &reports {
        let status = if r.passed { "passed" } else { "FAILED" };
        eprintln!(
            "{:<20} {status} ({} trials, worst violation {})",
            r.name,
            r.trials,
            sig17(r.worst_violation)
        );
    }
    if reports.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

/// `converge --config F --out F`
pub fn cmd_converge(config_path: &Path, out_path: &Path) -> i32 {
    let prep = match prepare(config_path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let Experiment::Converge(spec) = &prep.experiment else {
        eprintln!("error: config lists suites; use `verify`");
        return EXIT_USAGE;
    };
    let result = match integrate::integrate(
        &prep.model,
        &spec.f,
        &spec.x,
        spec.a,
        spec.b,
        spec.side,
        spec.options,
    ) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = write_file(out_path, |w| result.write_csv(w)) {
        eprintln!("error: cannot write {}: {e}", out_path.display());
        return EXIT_USAGE;
    }
    if result.converged {
        EXIT_OK
    } else {
        let last = result
            .diagnostics
            .last()
            .map_or(f64::NAN, |r| r.successive_gap_h);
        eprintln!(
            "not converged within depth {}: last successive gap {} > {}",
            spec.options.max_depth,
            sig17(last),
            sig17(spec.options.tol_conv)
        );
        EXIT_FAILED
    }
}

/// Built-in fixture of the demo: two qubits revealed at times 1 and 2 on
/// `[0, 3]`, generator `diag(1.5, 2.5) ⊗ 1`, martingale `X_T = σx⊗1 + σz⊗σx`.
pub fn demo_fixture() -> (Model, Element, Process) {
    let shape = ChainShape::qubits(2);
    let schedule = FiltrationSchedule::new(vec![1.0, 2.0], 3.0).expect("valid schedule");
    let model = Model::trace(shape, schedule).expect("valid model");
    let generator = embed_factor(&diag(&[1.5, 2.5]), 0, model.shape()).expect("slot 0");
    let terminal = embed_factor(&pauli_x(), 0, model.shape()).expect("slot 0")
        + product_element(&[pauli_z(), pauli_x()], model.shape()).expect("two factors");
    (model, generator, Process::martingale(terminal))
}

const DEMO_SEED: u64 = 2;
const DEMO_TRIALS: usize = 16;

/// `demo`: walk through the spectral step integrand on the built-in fixture.
pub fn cmd_demo(out: &mut impl Write) -> i32 {
    match demo(out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

fn demo(out: &mut impl Write) -> std::result::Result<bool, Box<dyn std::error::Error>> {
    let (model, generator, x) = demo_fixture();
    let f = Process::spectral_step(&model, generator.clone(), None)?;
    let Process::SpectralStep(step) = &f else {
        unreachable!("spectral_step builds a spectral step")
    };
    let horizon = model.horizon();

    writeln!(
        out,
        "Spectral step integrand f(t) = e([0, t]) of g = diag(1.5, 2.5) (x) 1 on [0, {horizon}]"
    )?;
    writeln!(
        out,
        "Filtration jumps at {:?}; X(t) = E_t(sx (x) 1 + sz (x) sx).",
        model.schedule().jump_times()
    )?;
    writeln!(out)?;
    for lvl in step.levels() {
        match lvl.onset {
            Some(t) => writeln!(
                out,
                "  eigenvalue {} switches on at t = {t}",
                lvl.eigenvalue
            )?,
            None => writeln!(out, "  eigenvalue {} never switches on", lvl.eigenvalue)?,
        }
    }
    writeln!(out)?;
    writeln!(
        out,
        "f is an increasing family of projections, so any two values differ by a"
    )?;
    writeln!(
        out,
        "projection. Across a switch-on time the difference has norm one, no matter"
    )?;
    writeln!(out, "how close the two times are:")?;
    writeln!(out)?;
    writeln!(out, "{:>14} {:>14} {:>12}", "s", "t", "|f(t)-f(s)|")?;
    let jumps = f.discontinuities(&model);
    for &tau in &jumps {
        for h in [1e-1, 1e-3, 1e-6, 1e-9] {
            for (s, t) in [(tau - h, tau), (tau, tau + h)] {
                let gap = operator_norm(&(&f.eval(&model, t)? - &f.eval(&model, s)?));
                writeln!(out, "{s:>14.9} {t:>14.9} {gap:>12.3}")?;
            }
        }
    }
    writeln!(out)?;
    writeln!(
        out,
        "Gaps over (tau - h, tau] stay at one while those over (tau, tau + h] vanish:"
    )?;
    writeln!(
        out,
        "f is right-continuous in norm but fails to be norm continuous at every jump."
    )?;
    writeln!(out)?;

    let tol = SuiteTolerances::default();
    let result =
        integrate::integrate(&model, &f, &x, 0.0, horizon, Side::Right, tol.convergence())?;
    let oracle = integrate::oracle_integral(&model, &f, &x, 0.0, horizon, Side::Right)?;
    let depth = result.diagnostics.last().map_or(0, |r| r.depth);
    writeln!(
        out,
        "Nevertheless the integral of f against X over [0, {horizon}] exists: dyadic sums {} at depth {depth},",
        if result.converged { "converge" } else { "do not converge" }
    )?;
    writeln!(
        out,
        "with |S - oracle|_H = {}.",
        sig17(model.norm_h(&(&result.value - &oracle)))
    )?;
    let mu = integrate::mu_increment(&model, &x, 0.0, horizon, tol.eq)?;
    writeln!(
        out,
        "Quadratic mass of X on [0, {horizon}]: mu = {}.",
        sig17(mu)
    )?;
    writeln!(out)?;

    let report = verify::suite_remark2(&model, &generator, &x, DEMO_TRIALS, DEMO_SEED, &tol);
    writeln!(
        out,
        "suite {}: {} ({} trials, worst violation {})",
        report.name,
        if report.passed { "passed" } else { "FAILED" },
        report.trials,
        sig17(report.worst_violation)
    )?;
    for fail in &report.failures {
        writeln!(
            out,
            "  seed {} {}: {}",
            fail.seed,
            fail.quantity,
            sig17(fail.magnitude)
        )?;
    }
    Ok(report.passed && result.converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_is_deterministic_and_passes() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        assert_eq!(cmd_demo(&mut a), EXIT_OK);
        assert_eq!(cmd_demo(&mut b), EXIT_OK);
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("|f(t)-f(s)|"));
        assert!(text.contains("suite remark2: passed"));
    }

    #[test]
    fn missing_config_is_a_usage_error() {
        let dir = std::env::temp_dir();
        let missing = dir.join("ncqsi-no-such-config.json");
        assert_eq!(
            cmd_verify(&missing, &dir.join("ncqsi-unused.json"), None),
            EXIT_USAGE
        );
        assert_eq!(
            cmd_converge(&missing, &dir.join("ncqsi-unused.csv")),
            EXIT_USAGE
        );
    }
}
