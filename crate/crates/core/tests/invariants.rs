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

//! Randomized invariants of the algebra, filtration, process and integration
//! layers. Each case draws its instance from a seeded generator.

use ncqsi::algebra::{embed_factor, operator_norm, product_element, ChainShape, Element};
use ncqsi::filtration::{FiltrationSchedule, Model};
use ncqsi::gns::GnsBasis;
use ncqsi::integrate::{self, ConvergenceOptions, Side};
use ncqsi::linalg::{pauli_x, pauli_y, pauli_z, Matrix};
use ncqsi::process::Process;
use ncqsi::verify::random;
use proptest::prelude::*;
use rand::Rng;

mod common;
use common::random_model;

fn rel(defect: f64, scale: f64) -> f64 {
    defect / scale.max(1.0)
}

fn random_time_pair(rng: &mut random::TrialRng, horizon: f64) -> (f64, f64) {
    let (u, v) = (
        random::time(rng, 0.0, horizon),
        random::time(rng, 0.0, horizon),
    );
    (u.min(v), u.max(v))
}

fn random_process(rng: &mut random::TrialRng, model: &Model, kind: usize) -> Process {
    match kind {
        0 => random::martingale(rng, model),
        1 => random::monotone_process(rng, model, 3).unwrap(),
        2 => random::norm_continuous_process(rng, model, 3).unwrap(),
        _ => Process::constant(random::element_in_level(rng, model.shape(), 0)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn state_is_positive_and_faithful(seed in any::<u64>(), tracial in any::<bool>()) {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, tracial);
        let x = random::element(&mut rng, model.shape());
        let w = model.state_value(&(&x.adjoint() * &x)).unwrap();
        prop_assert!(w.im.abs() <= 1e-12 * w.re.abs().max(1.0));
        prop_assert!(w.re > 0.0);
        let zero = Element::zeros(model.shape());
        prop_assert_eq!(model.state_value(&(&zero.adjoint() * &zero)).unwrap().re, 0.0);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(seed in any::<u64>(), tracial in any::<bool>()) {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, tracial);
        let x = random::element(&mut rng, model.shape());
        let y = random::element(&mut rng, model.shape());
        let xy = model.inner(&x, &y).unwrap();
        let yx = model.inner(&y, &x).unwrap();
        prop_assert!(rel((xy - yx.conj()).norm(), xy.norm()) <= 1e-12);
        let via_state = model.state_value(&(&x.adjoint() * &x)).unwrap().re.sqrt();
        prop_assert!(rel((model.norm_h(&x) - via_state).abs(), via_state) <= 1e-12);
    }

    #[test]
    fn operator_norm_is_submultiplicative_and_unitarily_invariant(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let shape = ChainShape::qubits(3);
        let x = random::element(&mut rng, &shape);
        let y = random::element(&mut rng, &shape);
        let (nx, ny) = (operator_norm(&x), operator_norm(&y));
        prop_assert!(operator_norm(&(&x * &y)) <= nx * ny * (1.0 + 1e-10));
        let paulis = [Matrix::identity(2, 2), pauli_x(), pauli_y(), pauli_z()];
        let mut unitary = || {
            let factors: Vec<Matrix> = (0..3).map(|_| paulis[rng.random_range(0..4)].clone()).collect();
            product_element(&factors, &shape).unwrap()
        };
        let (u, v) = (unitary(), unitary());
        prop_assert!((operator_norm(&(&(&u * &x) * &v)) - nx).abs() <= 1e-10 * nx.max(1.0));
    }

    #[test]
    fn embedding_commutes_with_adjoint(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let shape = ChainShape::new(vec![2, 3, 2]).unwrap();
        let k = rng.random_range(0..3);
        let a = random::matrix(&mut rng, shape.factor_dims()[k]);
        let lhs = embed_factor(&a, k, &shape).unwrap().adjoint();
        let rhs = embed_factor(&a.adjoint(), k, &shape).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conditional_expectations_form_a_tower(seed in any::<u64>(), tracial in any::<bool>()) {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, tracial);
        let x = random::element(&mut rng, model.shape());
        let (s, t) = random_time_pair(&mut rng, model.horizon());
        let scale = x.max_abs();
        let inner = model.cond_expect(&x, t).unwrap();
        let both = model.cond_expect(&inner, s).unwrap();
        prop_assert!(rel(both.max_abs_diff(&model.cond_expect(&x, s).unwrap()), scale) <= 1e-12);
        let reversed = model.cond_expect(&model.cond_expect(&x, s).unwrap(), t).unwrap();
        prop_assert!(rel(reversed.max_abs_diff(&model.cond_expect(&x, s).unwrap()), scale) <= 1e-12);
        let w = model.state_value(&x).unwrap();
        prop_assert!(rel((model.state_value(&inner).unwrap() - w).norm(), w.norm()) <= 1e-12);
    }

    #[test]
    fn conditional_expectation_is_a_positive_bimodule_map(seed in any::<u64>(), tracial in any::<bool>()) {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, tracial);
        let t = random::time(&mut rng, 0.0, model.horizon());
        let level = model.level_of(t).unwrap();
        let a = random::element_in_level(&mut rng, model.shape(), level);
        let b = random::element_in_level(&mut rng, model.shape(), level);
        let x = random::element(&mut rng, model.shape());
        let lhs = model.cond_expect(&(&(&a * &x) * &b), t).unwrap();
        let rhs = &(&a * &model.cond_expect(&x, t).unwrap()) * &b;
        prop_assert!(rel(lhs.max_abs_diff(&rhs), rhs.max_abs()) <= 1e-12);
        let g = random::element(&mut rng, model.shape());
        let e = model.cond_expect(&(&g.adjoint() * &g), t).unwrap();
        prop_assert!(ncqsi::algebra::psd_check(&e, 1e-10).unwrap());
    }

    #[test]
    fn projections_are_increasing_orthogonal_projections(seed in any::<u64>(), tracial in any::<bool>()) {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, tracial);
        let basis = GnsBasis::new(&model).unwrap();
        let (s, t) = random_time_pair(&mut rng, model.horizon());
        let ps = model.projection_matrix(&basis, s).unwrap();
        let pt = model.projection_matrix(&basis, t).unwrap();
        prop_assert!((&pt * &pt).max_abs_diff(&pt) <= 1e-10);
        prop_assert!(pt.self_adjoint_defect() <= 1e-10);
        prop_assert!((&pt - &ps).min_eigenvalue() >= -1e-10);
        let (u, v) = random_time_pair(&mut rng, model.horizon());
        let (lo, hi) = (t.max(u), t.max(v));
        let later = &model.projection_matrix(&basis, hi).unwrap() - &model.projection_matrix(&basis, lo).unwrap();
        prop_assert!((&(&pt - &ps) * &later).max_abs() <= 1e-10);
    }

    #[test]
    fn processes_are_adapted(seed in any::<u64>(), tracial in any::<bool>(), kind in 0usize..4) {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, tracial);
        let p = random_process(&mut rng, &model, kind);
        let t = random::time(&mut rng, 0.0, model.horizon());
        let v = p.eval(&model, t).unwrap();
        let proj = model.cond_expect(&v, t).unwrap();
        prop_assert!(rel(proj.max_abs_diff(&v), v.max_abs()) <= 1e-12);
    }

    #[test]
    fn martingales_satisfy_the_tower_and_are_piecewise_constant(seed in any::<u64>(), tracial in any::<bool>()) {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, tracial);
        let x = random::martingale(&mut rng, &model);
        let (s, t) = random_time_pair(&mut rng, model.horizon());
        let xs = x.eval(&model, s).unwrap();
        let projected = model.cond_expect(&x.eval(&model, t).unwrap(), s).unwrap();
        prop_assert!(rel(projected.max_abs_diff(&xs), xs.max_abs()) <= 1e-12);
        let jumps = model.schedule().jump_times();
        let j = rng.random_range(0..jumps.len());
        let next = jumps.get(j + 1).copied().unwrap_or(model.horizon());
        let inside = jumps[j] + 0.5 * (next - jumps[j]);
        prop_assert_eq!(x.eval(&model, jumps[j]).unwrap(), x.eval(&model, inside).unwrap());
    }

    #[test]
    fn monotone_processes_are_bounded_by_their_endpoints(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, true);
        let f = random::monotone_process(&mut rng, &model, 3).unwrap();
        let c = operator_norm(&f.eval(&model, 0.0).unwrap()).max(operator_norm(&f.eval(&model, model.horizon()).unwrap()));
        let t = random::time(&mut rng, 0.0, model.horizon());
        prop_assert!(operator_norm(&f.eval(&model, t).unwrap()) <= c + 1e-10);
    }

    #[test]
    fn sigma_reproduces_the_integral_sum(seed in any::<u64>(), tracial in any::<bool>()) {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, tracial);
        let basis = GnsBasis::new(&model).unwrap();
        let f = random::monotone_process(&mut rng, &model, 2).unwrap();
        let x = random::martingale(&mut rng, &model);
        let theta = random::partition(&mut rng, 0.0, model.horizon(), 6);
        let sigma = integrate::sigma_operator(&model, &basis, &theta, &f).unwrap();
        let xb = basis.coords(&x.eval(&model, theta.b()).unwrap());
        let sum = basis.coords(&integrate::right_sum(&model, &theta, &f, &x).unwrap());
        let defect = rel((sigma.apply(&xb) - sum).norm(), xb.norm());
        prop_assert!(defect <= 1e-12, "defect {:e}", defect);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn lipschitz_gap_is_bounded_by_mesh(seed in any::<u64>(), tracial in any::<bool>()) {
        let mut rng = random::rng(seed);
        let model = random_model(&mut rng, tracial);
        let f = random::norm_continuous_process(&mut rng, &model, 2).unwrap();
        let x = random::martingale(&mut rng, &model);
        let opts = ConvergenceOptions { tol_conv: 1e-9, max_depth: 12 };
        let b = model.horizon();
        let result = integrate::integrate(&model, &f, &x, 0.0, b, Side::Right, opts).unwrap();
        let bound = f.lipschitz_bound().unwrap() * model.norm_h(&x.eval(&model, b).unwrap());
        for r in &result.diagnostics {
            prop_assert!(r.gap_to_oracle_h <= bound * r.mesh * (1.0 + 1e-9) + 1e-12);
        }
    }
}

#[test]
fn schedule_boundaries_are_right_continuous() {
    let model = Model::trace(
        ChainShape::qubits(2),
        FiltrationSchedule::new(vec![1.0, 2.0], 3.0).unwrap(),
    )
    .unwrap();
    assert_eq!(model.level_of(1.0).unwrap(), 1);
    assert_eq!(model.level_of(0.999).unwrap(), 0);
    assert_eq!(model.schedule().level_before(1.0).unwrap(), 0);
}
