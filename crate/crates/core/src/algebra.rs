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

//! Tensor-chain matrix algebras, faithful states and the GNS inner product.
//!
//! The algebra is `M_{d_1} ⊗ … ⊗ M_{d_n}` acting on `C^N`, `N = Π d_i`, with
//! factor 0 as the most significant Kronecker slot. The GNS space is the
//! algebra itself with `⟨x, y⟩ = ω(y* x)`; the cyclic vector `Ω` is the unit.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Equality and positivity tolerances for the math core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative equality tolerance, scaled by `max(1, matrix scale)`.
    pub eq: f64,
    /// Eigenvalue slack for positivity checks, scaled by `max(1, ‖x‖)`.
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eq: 1e-10,
            psd: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainShape {
    factor_dims: Vec<usize>,
}

impl ChainShape {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::InvalidShape(
                "chain needs at least one factor".into(),
            ));
        }
        if let Some(d) = factor_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidShape(format!(
                "factor dimension {d} is below 2"
            )));
        }
        Ok(ChainShape { factor_dims })
    }

    /// Chain of `n` qubit factors.
    pub fn qubits(n: usize) -> Self {
        ChainShape::new(vec![2; n.max(1)]).expect("qubit chain is valid")
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    /// Number of tensor factors `n`.
    pub fn len(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Acting dimension `N = Π d_i`.
    pub fn dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    /// Dimension of the first `level` factors.
    pub fn prefix_dim(&self, level: usize) -> usize {
        self.factor_dims[..level].iter().product()
    }

    /// Dimension of the factors from `level` onward.
    pub fn suffix_dim(&self, level: usize) -> usize {
        self.factor_dims[level..].iter().product()
    }
}

impl Serialize for ChainShape {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.factor_dims.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChainShape {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dims = Vec::<usize>::deserialize(deserializer)?;
        ChainShape::new(dims).map_err(serde::de::Error::custom)
    }
}

/// A member of the chain algebra: an `N × N` complex matrix tagged with its shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    shape: ChainShape,
    mat: Matrix,
}

impl Element {
    pub fn from_matrix(shape: &ChainShape, mat: Matrix) -> Result<Self> {
        let n = shape.dim();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: mat.nrows().max(mat.ncols()),
            });
        }
        Ok(Element {
            shape: shape.clone(),
            mat,
        })
    }

    pub fn identity(shape: &ChainShape) -> Self {
        let n = shape.dim();
        Element {
            shape: shape.clone(),
            mat: Matrix::identity(n, n),
        }
    }

    /// The cyclic vector `Ω`.
    pub fn omega(shape: &ChainShape) -> Self {
        Self::identity(shape)
    }

    pub fn zeros(shape: &ChainShape) -> Self {
        let n = shape.dim();
        Element {
            shape: shape.clone(),
            mat: Matrix::zeros(n, n),
        }
    }

    pub fn scalar(shape: &ChainShape, z: Complex64) -> Self {
        Self::identity(shape).scale(z)
    }

    pub fn shape(&self) -> &ChainShape {
        &self.shape
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Element {
            shape: self.shape.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Element {
            shape: self.shape.clone(),
            mat: self.mat.map(|v| v * z),
        }
    }

    pub fn scale_real(&self, r: f64) -> Self {
        self.scale(Complex64::new(r, 0.0))
    }

    /// Largest entry modulus, the scale used by relative equality checks.
    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.mat)
    }

    pub fn max_abs_diff(&self, other: &Element) -> f64 {
        linalg::max_abs_diff(&self.mat, &other.mat)
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.mat)
    }

    /// Hermitian to `tol` relative to the entry scale.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.max_abs().max(1.0)
    }

    /// Equal to `other` within `tol` relative to the larger entry scale.
    pub fn approx_eq(&self, other: &Element, tol: f64) -> bool {
        self.shape == other.shape
            && self.max_abs_diff(other) <= tol * self.max_abs().max(other.max_abs()).max(1.0)
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    fn check_same_shape(&self, other: &Element) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape.factor_dims.clone(),
                found: other.shape.factor_dims.clone(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Element, op: impl Fn(&Matrix, &Matrix) -> Matrix) -> Element {
        assert_eq!(
            self.shape, other.shape,
            "arithmetic between elements of different chains"
        );
        Element {
            shape: self.shape.clone(),
            mat: op(&self.mat, &other.mat),
        }
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Mul for Element {
    type Output = Element;
    fn mul(self, rhs: Element) -> Element {
        &self * &rhs
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            shape: self.shape.clone(),
            mat: -&self.mat,
        }
    }
}

/// `1 ⊗ … ⊗ a ⊗ … ⊗ 1` with `a` in slot `k` (zero-based).
pub fn embed_factor(a: &Matrix, k: usize, shape: &ChainShape) -> Result<Element> {
    let dims = shape.factor_dims();
    if k >= dims.len() {
        return Err(Error::FactorOutOfRange {
            index: k,
            len: dims.len(),
        });
    }
    if a.nrows() != dims[k] || a.ncols() != dims[k] {
        return Err(Error::DimensionMismatch {
            expected: dims[k],
            found: a.nrows().max(a.ncols()),
        });
    }
    let left = shape.prefix_dim(k);
    let right = shape.suffix_dim(k + 1);
    let mat = linalg::kron(
        &linalg::kron(&Matrix::identity(left, left), a),
        &Matrix::identity(right, right),
    );
    Element::from_matrix(shape, mat)
}

/// `a ⊗ 1` where `a` acts on the first `level` factors.
pub fn embed_prefix(a: &Matrix, level: usize, shape: &ChainShape) -> Result<Element> {
    if level > shape.len() {
        return Err(Error::FactorOutOfRange {
            index: level,
            len: shape.len(),
        });
    }
    let left = shape.prefix_dim(level);
    if a.nrows() != left || a.ncols() != left {
        return Err(Error::DimensionMismatch {
            expected: left,
            found: a.nrows().max(a.ncols()),
        });
    }
    let right = shape.suffix_dim(level);
    Element::from_matrix(shape, linalg::kron(a, &Matrix::identity(right, right)))
}

/// Kronecker product of one matrix per factor.
pub fn product_element(factors: &[Matrix], shape: &ChainShape) -> Result<Element> {
    if factors.len() != shape.len() {
        return Err(Error::DimensionMismatch {
            expected: shape.len(),
            found: factors.len(),
        });
    }
    let mut acc = Matrix::identity(1, 1);
    for (m, &d) in factors.iter().zip(shape.factor_dims()) {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.nrows().max(m.ncols()),
            });
        }
        acc = linalg::kron(&acc, m);
    }
    Element::from_matrix(shape, acc)
}

/// The state ω: normalized trace, or a faithful product of factor densities.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Trace,
    ProductDensities(Vec<Matrix>),
}

impl StateSpec {
    /// Validated product state.
    pub fn product(densities: Vec<Matrix>, shape: &ChainShape, tol: f64) -> Result<Self> {
        let s = StateSpec::ProductDensities(densities);
        s.validate(shape, tol)?;
        Ok(s)
    }

    pub fn is_tracial(&self) -> bool {
        matches!(self, StateSpec::Trace)
    }

    /// Checks factor count, dimensions, hermiticity, unit trace and faithfulness.
    pub fn validate(&self, shape: &ChainShape, tol: f64) -> Result<()> {
        let StateSpec::ProductDensities(rhos) = self else {
            return Ok(());
        };
        if rhos.len() != shape.len() {
            return Err(Error::InvalidState(format!(
                "{} densities for a chain of {} factors",
                rhos.len(),
                shape.len()
            )));
        }
        for (i, (rho, &d)) in rhos.iter().zip(shape.factor_dims()).enumerate() {
            if rho.nrows() != d || rho.ncols() != d {
                return Err(Error::InvalidState(format!(
                    "density {i} is {}x{}, factor dimension is {d}",
                    rho.nrows(),
                    rho.ncols()
                )));
            }
            let defect = linalg::hermitian_defect(rho);
            if defect > tol {
                return Err(Error::InvalidState(format!(
                    "density {i} is not hermitian (defect {defect:e})"
                )));
            }
            let tr = rho.trace();
            if (tr - linalg::ONE).norm() > tol {
                return Err(Error::InvalidState(format!(
                    "density {i} has trace {tr}, expected 1"
                )));
            }
            let min = linalg::min_eigenvalue(rho);
            if min <= 0.0 {
                return Err(Error::InvalidState(format!(
                    "density {i} is not faithful (min eigenvalue {min:e})"
                )));
            }
        }
        Ok(())
    }

    /// Density of the factors `from..n`, as a `suffix_dim(from)` square matrix.
    pub fn tail_density(&self, shape: &ChainShape, from: usize) -> Matrix {
        let d = shape.suffix_dim(from);
        match self {
            StateSpec::Trace => Matrix::identity(d, d).scale(1.0 / d as f64),
            StateSpec::ProductDensities(rhos) => rhos[from..]
                .iter()
                .fold(Matrix::identity(1, 1), |acc, r| linalg::kron(&acc, r)),
        }
    }

    /// The full density `ρ_1 ⊗ … ⊗ ρ_n` (or `1/N`).
    pub fn density(&self, shape: &ChainShape) -> Matrix {
        self.tail_density(shape, 0)
    }

    fn check_shape(&self, shape: &ChainShape) -> Result<()> {
        if let StateSpec::ProductDensities(rhos) = self {
            let dims: Vec<usize> = rhos.iter().map(|r| r.nrows()).collect();
            if dims != shape.factor_dims() {
                return Err(Error::ShapeMismatch {
                    expected: shape.factor_dims().to_vec(),
                    found: dims,
                });
            }
        }
        Ok(())
    }
}

/// `ω(x)`.
pub fn state_value(x: &Element, s: &StateSpec) -> Result<Complex64> {
    s.check_shape(x.shape())?;
    Ok(match s {
        StateSpec::Trace => x.trace() / x.shape().dim() as f64,
        StateSpec::ProductDensities(_) => {
            linalg::trace_of_product(&s.density(x.shape()), x.matrix())
        }
    })
}

/// `⟨x, y⟩_ω = ω(y* x)`.
pub fn gns_inner(x: &Element, y: &Element, s: &StateSpec) -> Result<Complex64> {
    x.check_same_shape(y)?;
    s.check_shape(x.shape())?;
    let prod = y.matrix().adjoint() * x.matrix();
    Ok(match s {
        StateSpec::Trace => prod.trace() / x.shape().dim() as f64,
        StateSpec::ProductDensities(_) => linalg::trace_of_product(&s.density(x.shape()), &prod),
    })
}

/// `‖xΩ‖_H = ‖x‖_2 = ω(x* x)^{1/2}`.
pub fn gns_norm(x: &Element, s: &StateSpec) -> Result<f64> {
    Ok(gns_inner(x, x, s)?.re.max(0.0).sqrt())
}

pub fn operator_norm(x: &Element) -> f64 {
    linalg::operator_norm(x.matrix())
}

/// True iff the smallest eigenvalue is at least `-tol · max(1, ‖x‖)`.
pub fn psd_check(x: &Element, tol: f64) -> Result<bool> {
    psd_check_matrix(x.matrix(), tol)
}

/// [`psd_check`] for a bare hermitian matrix (also used on GNS operators).
pub fn psd_check_matrix(m: &Matrix, tol: f64) -> Result<bool> {
    let scale = linalg::max_abs(m).max(1.0);
    let defect = linalg::hermitian_defect(m);
    if defect > tol * scale {
        return Err(Error::NotHermitian { defect });
    }
    let vals = linalg::eigvalsh(m);
    let norm = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok(vals.first().copied().unwrap_or(0.0) >= -tol * norm.max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag, kron, pauli_x, pauli_z};

    fn two_qubits() -> ChainShape {
        ChainShape::qubits(2)
    }

    #[test]
    fn shape_rejects_bad_factors() {
        assert!(ChainShape::new(vec![]).is_err());
        assert!(ChainShape::new(vec![2, 1]).is_err());
        assert_eq!(ChainShape::new(vec![2, 3]).unwrap().dim(), 6);
    }

    #[test]
    fn embed_identity_is_identity() {
        let s = two_qubits();
        let e = embed_factor(&Matrix::identity(2, 2), 0, &s).unwrap();
        assert_eq!(e, Element::identity(&s));
    }

    #[test]
    fn embed_sigma_z_first_slot() {
        let e = embed_factor(&pauli_z(), 0, &two_qubits()).unwrap();
        assert_eq!(e.matrix(), &diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn embed_sigma_x_second_slot_matches_brute_kronecker() {
        let e = embed_factor(&pauli_x(), 1, &two_qubits()).unwrap();
        // brute-force (I ⊗ σx)[(a,b),(a',b')] = δ_{aa'} σx[b,b']
        let sx = pauli_x();
        for r in 0..4 {
            for col in 0..4 {
                let (a, b) = (r / 2, r % 2);
                let (a2, b2) = (col / 2, col % 2);
                let expected = if a == a2 { sx[(b, b2)] } else { linalg::ZERO };
                assert_eq!(e.matrix()[(r, col)], expected);
            }
        }
    }

    #[test]
    fn embed_errors() {
        let s = two_qubits();
        assert!(matches!(
            embed_factor(&pauli_x(), 2, &s),
            Err(Error::FactorOutOfRange { .. })
        ));
        assert!(matches!(
            embed_factor(&Matrix::identity(3, 3), 0, &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn embed_preserves_norm_and_adjoint() {
        let s = ChainShape::new(vec![2, 3]).unwrap();
        let a = Matrix::from_fn(3, 3, |i, j| c(i as f64 - j as f64, (i * j) as f64));
        let e = embed_factor(&a, 1, &s).unwrap();
        assert!((operator_norm(&e) - linalg::operator_norm(&a)).abs() < 1e-12);
        assert_eq!(e.adjoint(), embed_factor(&a.adjoint(), 1, &s).unwrap());
    }

    #[test]
    fn state_values() {
        let s = two_qubits();
        let z1 = embed_factor(&pauli_z(), 0, &s).unwrap();
        assert!(
            (state_value(&Element::identity(&s), &StateSpec::Trace).unwrap() - linalg::ONE).norm()
                < 1e-15
        );
        assert!(state_value(&z1, &StateSpec::Trace).unwrap().norm() < 1e-15);
        let p = 0.3;
        let st =
            StateSpec::product(vec![diag(&[p, 1.0 - p]), diag(&[0.5, 0.5])], &s, 1e-12).unwrap();
        let v = state_value(&z1, &st).unwrap();
        assert!((v - c(2.0 * p - 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn state_shape_mismatch() {
        let st = StateSpec::ProductDensities(vec![diag(&[0.5, 0.5])]);
        let x = Element::identity(&two_qubits());
        assert!(matches!(
            state_value(&x, &st),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn product_state_validation() {
        let s = two_qubits();
        let half = diag(&[0.5, 0.5]);
        assert!(StateSpec::product(vec![diag(&[1.0, 0.0]), half.clone()], &s, 1e-12).is_err());
        assert!(StateSpec::product(vec![diag(&[0.6, 0.6]), half.clone()], &s, 1e-12).is_err());
        assert!(StateSpec::product(vec![half.clone()], &s, 1e-12).is_err());
        assert!(StateSpec::product(vec![half.clone(), half], &s, 1e-12).is_ok());
    }

    #[test]
    fn gns_inner_examples() {
        let s = two_qubits();
        let om = Element::omega(&s);
        let st = StateSpec::product(vec![diag(&[0.2, 0.8]), diag(&[0.9, 0.1])], &s, 1e-12).unwrap();
        assert!((gns_inner(&om, &om, &st).unwrap() - linalg::ONE).norm() < 1e-15);
        let x1 = embed_factor(&pauli_x(), 0, &s).unwrap();
        let z1 = embed_factor(&pauli_z(), 0, &s).unwrap();
        assert!(gns_inner(&x1, &z1, &StateSpec::Trace).unwrap().norm() < 1e-15);
    }

    #[test]
    fn gns_inner_matches_direct_trace() {
        let s = two_qubits();
        let rho1 =
            Matrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]);
        let rho2 = diag(&[0.25, 0.75]);
        let st = StateSpec::product(vec![rho1.clone(), rho2.clone()], &s, 1e-12).unwrap();
        let x = Element::from_matrix(
            &s,
            Matrix::from_fn(4, 4, |i, j| c(i as f64 + 1.0, j as f64 * 0.5)),
        )
        .unwrap();
        let y = Element::from_matrix(
            &s,
            Matrix::from_fn(4, 4, |i, j| c((i * j) as f64 - 1.0, 0.25)),
        )
        .unwrap();
        let rho = kron(&rho1, &rho2);
        let direct = (rho * y.matrix().adjoint() * x.matrix()).trace();
        assert!((gns_inner(&x, &y, &st).unwrap() - direct).norm() < 1e-12);
    }

    #[test]
    fn operator_norm_examples() {
        let s = two_qubits();
        assert!((operator_norm(&Element::identity(&s)) - 1.0).abs() < 1e-14);
        let xz = product_element(&[pauli_x(), pauli_z()], &s).unwrap();
        assert!((operator_norm(&xz) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn psd_examples() {
        let s = two_qubits();
        let id = Element::identity(&s);
        assert!(psd_check(&id, 1e-10).unwrap());
        assert!(!psd_check(&-&id, 1e-10).unwrap());
        let g = Element::from_matrix(
            &s,
            Matrix::from_fn(4, 4, |i, j| c(i as f64 - 2.0 * j as f64, 1.0)),
        )
        .unwrap();
        assert!(psd_check(&(&g.adjoint() * &g), 1e-10).unwrap());
        let nonherm =
            Element::from_matrix(&s, Matrix::from_fn(4, 4, |i, j| c((i + 2 * j) as f64, 0.0)))
                .unwrap();
        assert!(matches!(
            psd_check(&nonherm, 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }
}
