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

//! JSON experiment configuration.
//!
//! Matrices are written as a row-major list of `[re, im]` pairs, or built
//! from named factors:
//!
//! ```json
//! {"kron": ["X", "I2"]}
//! {"sum": [{"kron": ["X", "I2"]}, {"kron": ["Z", "X"]}]}
//! {"scale": [0.5, 0.0], "of": "Z"}
//! ```
//!
//! Named factors are `"X"`, `"Y"`, `"Z"` and `"I<n>"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{ChainShape, Element, StateSpec};
use crate::error::{Error, Result};
use crate::filtration::{FiltrationSchedule, Model};
use crate::integrate::{ConvergenceOptions, Side};
use crate::linalg::{c, kron, pauli_x, pauli_y, pauli_z, Matrix};
use crate::process::{PiecewiseLinear, Process, RampedTerm};
use crate::verify::SuiteTolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Named(String),
    Dense(Vec<[f64; 2]>),
    Kron {
        kron: Vec<MatrixSpec>,
    },
    Sum {
        sum: Vec<MatrixSpec>,
    },
    Scaled {
        scale: [f64; 2],
        of: Box<MatrixSpec>,
    },
}

impl MatrixSpec {
    pub fn build(&self) -> Result<Matrix> {
        match self {
            MatrixSpec::Named(name) => named_matrix(name),
            MatrixSpec::Dense(entries) => {
                let n = (entries.len() as f64).sqrt().round() as usize;
                if n == 0 || n * n != entries.len() {
                    return Err(Error::Config(format!(
                        "dense matrix has {} entries, not a nonzero perfect square",
                        entries.len()
                    )));
                }
                Ok(Matrix::from_row_iterator(
                    n,
                    n,
                    entries.iter().map(|&[re, im]| c(re, im)),
                ))
            }
            MatrixSpec::Kron { kron: parts } => {
                let mut it = parts.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::Config("empty kron".into()))?
                    .build()?;
                it.try_fold(first, |acc, p| Ok(kron(&acc, &p.build()?)))
            }
            MatrixSpec::Sum { sum } => {
                let mut it = sum.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::Config("empty sum".into()))?
                    .build()?;
                it.try_fold(first, |acc, p| {
                    let m = p.build()?;
                    if m.shape() != acc.shape() {
                        return Err(Error::Config(format!(
                            "sum of {}x{} and {}x{} matrices",
                            acc.nrows(),
                            acc.ncols(),
                            m.nrows(),
                            m.ncols()
                        )));
                    }
                    Ok(acc + m)
                })
            }
            MatrixSpec::Scaled {
                scale: [re, im],
                of,
            } => Ok(of.build()? * c(*re, *im)),
        }
    }

    pub fn element(&self, shape: &ChainShape) -> Result<Element> {
        Element::from_matrix(shape, self.build()?)
    }
}

fn named_matrix(name: &str) -> Result<Matrix> {
    match name {
        "X" => Ok(pauli_x()),
        "Y" => Ok(pauli_y()),
        "Z" => Ok(pauli_z()),
        _ => match name.strip_prefix('I').map(str::parse::<usize>) {
            Some(Ok(n)) if n > 0 => Ok(Matrix::identity(n, n)),
            _ => Err(Error::Config(format!("unknown matrix name {name:?}"))),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub factor_dims: Vec<usize>,
    pub jump_times: Vec<f64>,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    Trace,
    Product { densities: Vec<MatrixSpec> },
}

/// A ramp table `[[t, v], ...]`, optionally with a declared Lipschitz
/// constant no smaller than the steepest slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RampConfig {
    Table(Vec<[f64; 2]>),
    Declared {
        knots: Vec<[f64; 2]>,
        lipschitz: f64,
    },
}

impl RampConfig {
    pub fn build(&self) -> Result<PiecewiseLinear> {
        let pairs = |k: &[[f64; 2]]| k.iter().map(|&[t, v]| (t, v)).collect::<Vec<_>>();
        match self {
            RampConfig::Table(k) => PiecewiseLinear::new(pairs(k)),
            RampConfig::Declared { knots, lipschitz } => {
                PiecewiseLinear::with_lipschitz(pairs(knots), *lipschitz)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub start: f64,
    pub element: MatrixSpec,
    pub ramp: RampConfig,
}

impl TermConfig {
    fn build(&self, shape: &ChainShape) -> Result<RampedTerm> {
        Ok(RampedTerm::new(
            self.start,
            self.element.element(shape)?,
            self.ramp.build()?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessConfig {
    Martingale {
        terminal: MatrixSpec,
    },
    Monotone {
        base: MatrixSpec,
        increments: Vec<TermConfig>,
    },
    NormContinuous {
        terms: Vec<TermConfig>,
    },
    SpectralStep {
        generator: MatrixSpec,
        #[serde(default)]
        threshold: Option<RampConfig>,
    },
    Constant {
        value: MatrixSpec,
    },
}

impl ProcessConfig {
    pub fn build(&self, model: &Model) -> Result<Process> {
        let shape = model.shape();
        let terms = |ts: &[TermConfig]| {
            ts.iter()
                .map(|t| t.build(shape))
                .collect::<Result<Vec<_>>>()
        };
        match self {
            ProcessConfig::Martingale { terminal } => {
                Ok(Process::martingale(terminal.element(shape)?))
            }
            ProcessConfig::Monotone { base, increments } => {
                Process::monotone(model, base.element(shape)?, terms(increments)?)
            }
            ProcessConfig::NormContinuous { terms: ts } => {
                Process::norm_continuous(model, terms(ts)?)
            }
            ProcessConfig::SpectralStep {
                generator,
                threshold,
            } => {
                let threshold = threshold.as_ref().map(RampConfig::build).transpose()?;
                Process::spectral_step(model, generator.element(shape)?, threshold)
            }
            ProcessConfig::Constant { value } => Ok(Process::constant(value.element(shape)?)),
        }
    }
}

fn default_trials() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "snake_case", deny_unknown_fields)]
pub enum SuiteConfig {
    ProjectionFamily {
        #[serde(default = "default_trials")]
        trials: usize,
    },
    IncrementIdentity {
        #[serde(default = "default_trials")]
        trials: usize,
    },
    ThmMonotone {
        f: String,
        x: String,
        #[serde(default = "default_trials")]
        trials: usize,
    },
    ThmContinuous {
        f: String,
        x: String,
        eps: Vec<f64>,
        #[serde(default = "default_trials")]
        trials: usize,
    },
    ThmTracial {
        f: String,
        x: String,
        grid: Vec<f64>,
        #[serde(default = "default_trials")]
        trials: usize,
    },
    Remark2 {
        generator: MatrixSpec,
        x: String,
        #[serde(default = "default_trials")]
        trials: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub f: String,
    pub x: String,
    pub interval: [f64; 2],
    pub side: Side,
    #[serde(default)]
    pub tol_conv: Option<f64>,
    #[serde(default)]
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentConfig {
    Suites(Vec<SuiteConfig>),
    Converge(ConvergeConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub chain: ChainConfig,
    pub state: StateConfig,
    #[serde(default)]
    pub processes: BTreeMap<String, ProcessConfig>,
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: SuiteTolerances,
}

/// A validated suite with its processes resolved.
#[derive(Debug, Clone)]
pub enum Suite {
    ProjectionFamily {
        trials: usize,
    },
    IncrementIdentity {
        trials: usize,
    },
    ThmMonotone {
        f: Process,
        x: Process,
        trials: usize,
    },
    ThmContinuous {
        f: Process,
        x: Process,
        eps: Vec<f64>,
        trials: usize,
    },
    ThmTracial {
        f: Process,
        x: Process,
        grid: Vec<f64>,
        trials: usize,
    },
    Remark2 {
        generator: Element,
        x: Process,
        trials: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Converge {
    pub f: Process,
    pub x: Process,
    pub a: f64,
    pub b: f64,
    pub side: Side,
    pub options: ConvergenceOptions,
}

#[derive(Debug, Clone)]
pub enum Experiment {
    Suites(Vec<Suite>),
    Converge(Box<Converge>),
}

/// Everything a command needs, checked against the model preconditions.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub model: Model,
    pub experiment: Experiment,
    pub seed: u64,
    pub tolerances: SuiteTolerances,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::from_json(&text)
    }

    pub fn model(&self) -> Result<Model> {
        let shape = ChainShape::new(self.chain.factor_dims.clone())?;
        let schedule = FiltrationSchedule::new(self.chain.jump_times.clone(), self.chain.horizon)?;
        let state = match &self.state {
            StateConfig::Trace => StateSpec::Trace,
            StateConfig::Product { densities } => {
                let rhos = densities
                    .iter()
                    .map(MatrixSpec::build)
                    .collect::<Result<Vec<_>>>()?;
                StateSpec::product(rhos, &shape, self.tolerances.eq)?
            }
        };
        Ok(Model::new(shape, state, schedule)?.with_tolerances(self.tolerances.core()))
    }

    pub fn prepare(&self) -> Result<Prepared> {
        let model = self.model()?;
        let mut built = BTreeMap::new();
        for (name, spec) in &self.processes {
            let p = spec
                .build(&model)
                .map_err(|e| Error::Config(format!("process {name:?}: {e}")))?;
            built.insert(name.as_str(), p);
        }
        let get = |name: &str| -> Result<Process> {
            built
                .get(name)
                .cloned()
                .ok_or_else(|| Error::Config(format!("unknown process {name:?}")))
        };
        let horizon = model.horizon();
        let experiment = match &self.experiment {
            ExperimentConfig::Suites(list) => {
                if list.is_empty() {
                    return Err(Error::Config("no suites requested".into()));
                }
                let suites = list
                    .iter()
                    .map(|s| {
                        Ok(match s {
                            SuiteConfig::ProjectionFamily { trials } => {
                                Suite::ProjectionFamily { trials: *trials }
                            }
                            SuiteConfig::IncrementIdentity { trials } => {
                                Suite::IncrementIdentity { trials: *trials }
                            }
                            SuiteConfig::ThmMonotone { f, x, trials } => Suite::ThmMonotone {
                                f: get(f)?,
                                x: get(x)?,
                                trials: *trials,
                            },
                            SuiteConfig::ThmContinuous { f, x, eps, trials } => {
                                if eps.is_empty() || eps.iter().any(|e| e.is_nan() || *e <= 0.0) {
                                    return Err(Error::Config(
                                        "eps must be a nonempty list of positive numbers".into(),
                                    ));
                                }
                                Suite::ThmContinuous {
                                    f: get(f)?,
                                    x: get(x)?,
                                    eps: eps.clone(),
                                    trials: *trials,
                                }
                            }
                            SuiteConfig::ThmTracial { f, x, grid, trials } => {
                                if grid.iter().any(|t| !(0.0..=horizon).contains(t)) {
                                    return Err(Error::Config(format!(
                                        "grid leaves [0, {horizon}]"
                                    )));
                                }
                                let mut grid = grid.clone();
                                grid.sort_by(f64::total_cmp);
                                Suite::ThmTracial {
                                    f: get(f)?,
                                    x: get(x)?,
                                    grid,
                                    trials: *trials,
                                }
                            }
                            SuiteConfig::Remark2 {
                                generator,
                                x,
                                trials,
                            } => Suite::Remark2 {
                                generator: generator.element(model.shape())?,
                                x: get(x)?,
                                trials: *trials,
                            },
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Experiment::Suites(suites)
            }
            ExperimentConfig::Converge(spec) => {
                let [a, b] = spec.interval;
                if !(0.0 <= a && a < b && b <= horizon) {
                    return Err(Error::Config(format!(
                        "interval [{a}, {b}] not inside [0, {horizon}]"
                    )));
                }
                let mut options = self.tolerances.convergence();
                if let Some(t) = spec.tol_conv {
                    options.tol_conv = t;
                }
                if let Some(d) = spec.max_depth {
                    options.max_depth = d;
                }
                Experiment::Converge(Box::new(Converge {
                    f: get(&spec.f)?,
                    x: get(&spec.x)?,
                    a,
                    b,
                    side: spec.side,
                    options,
                }))
            }
        };
        Ok(Prepared {
            model,
            experiment,
            seed: self.seed,
            tolerances: self.tolerances,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "chain": {"factor_dims": [2, 2], "jump_times": [1, 2], "horizon": 2},
        "state": {"kind": "trace"},
        "processes": {
            "X": {"kind": "martingale", "terminal": {"sum": [{"kron": ["X", "I2"]}, {"kron": ["Z", "X"]}]}},
            "f": {"kind": "norm_continuous", "terms": [{"start": 0, "element": "I4", "ramp": [[0, 0], [2, 2]]}]}
        },
        "experiment": {"converge": {"f": "f", "x": "X", "interval": [0, 2], "side": "right", "max_depth": 3}},
        "seed": 7
    }"#;

    #[test]
    fn parses_and_prepares() {
        let cfg = Config::from_json(BASE).unwrap();
        let prep = cfg.prepare().unwrap();
        assert_eq!(prep.seed, 7);
        match prep.experiment {
            Experiment::Converge(c) => {
                assert_eq!(c.options.max_depth, 3);
                assert_eq!(c.options.tol_conv, 1e-9);
                assert_eq!(c.f.lipschitz_bound(), Some(1.0));
            }
            _ => panic!("expected converge"),
        }
    }

    #[test]
    fn matrix_forms() {
        let dense: MatrixSpec = serde_json::from_str("[[0,0],[1,0],[1,0],[0,0]]").unwrap();
        assert_eq!(dense.build().unwrap(), pauli_x());
        let scaled: MatrixSpec = serde_json::from_str(r#"{"scale": [2, 0], "of": "Z"}"#).unwrap();
        assert_eq!(scaled.build().unwrap(), pauli_z() * c(2.0, 0.0));
        let bad: MatrixSpec = serde_json::from_str("[[1,0],[0,0],[0,0]]").unwrap();
        assert!(bad.build().is_err());
        assert!(MatrixSpec::Named("Q".into()).build().is_err());
        assert!(MatrixSpec::Named("I0".into()).build().is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_references() {
        let extra = BASE.replacen("\"seed\": 7", "\"seed\": 7, \"colour\": 1", 1);
        assert!(matches!(Config::from_json(&extra), Err(Error::Config(_))));
        let nested = BASE.replacen("\"horizon\": 2}", "\"horizon\": 2, \"x\": 0}", 1);
        assert!(Config::from_json(&nested).is_err());
        let dangling = BASE.replacen("\"f\": \"f\"", "\"f\": \"g\"", 1);
        let err = Config::from_json(&dangling).unwrap().prepare().unwrap_err();
        assert!(err.to_string().contains("unknown process"));
    }

    #[test]
    fn rejects_invalid_models_and_processes() {
        let late = BASE.replacen(
            "\"start\": 0, \"element\": \"I4\"",
            "\"start\": 0, \"element\": {\"kron\": [\"I2\", \"X\"]}",
            1,
        );
        assert!(Config::from_json(&late).unwrap().prepare().is_err());
        let sched = BASE.replacen("[1, 2], \"horizon\": 2", "[2, 1], \"horizon\": 2", 1);
        assert!(Config::from_json(&sched).unwrap().prepare().is_err());
        let state = BASE.replacen(
            "{\"kind\": \"trace\"}",
            "{\"kind\": \"product\", \"densities\": [[[1,0],[0,0],[0,0],[0,0]], \"I2\"]}",
            1,
        );
        assert!(Config::from_json(&state).unwrap().prepare().is_err());
    }

    #[test]
    fn suite_list_round_trips() {
        let text = r#"{"suites": [{"suite": "projection_family"}, {"suite": "thm_continuous", "f": "f", "x": "X", "eps": [0.1], "trials": 3}]}"#;
        let exp: ExperimentConfig = serde_json::from_str(text).unwrap();
        let again: ExperimentConfig =
            serde_json::from_str(&serde_json::to_string(&exp).unwrap()).unwrap();
        assert_eq!(exp, again);
        match exp {
            ExperimentConfig::Suites(s) => {
                assert_eq!(s[0], SuiteConfig::ProjectionFamily { trials: 20 })
            }
            _ => panic!(),
        }
    }
}
