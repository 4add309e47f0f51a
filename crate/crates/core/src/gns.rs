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

//! Orthonormal coordinates on the GNS space and matrices of operators on it.
//!
//! The basis is Gram–Schmidt over the matrix units `E_ij` in row-major order.
//! Under `⟨x, y⟩ = Tr(ρ y* x)` units in different rows are already orthogonal,
//! so the process reduces to orthonormalizing the standard basis of `C^N`
//! against the metric `ρ^T`; the result is the same deterministic basis.

use std::ops::{Add, Mul, Sub};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::algebra::{Element, StateSpec};
use crate::error::{Error, Result};
use crate::filtration::Model;
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone)]
pub struct GnsBasis {
    shape: crate::algebra::ChainShape,
    density: Matrix,
    /// Column `j` is the row profile `w_j` of the basis vectors `e_i w_j^T`.
    rows: Matrix,
    /// Per-factor `L_k = ρ_k conj(W_k)`, so that `coords(x) = x (L_1 ⊗ … ⊗ L_n)`.
    factors: Vec<Matrix>,
}

impl GnsBasis {
    /// Gram–Schmidt over the matrix units in index order. For a product
    /// density the result is the Kronecker product of the per-factor bases,
    /// so the orthonormalization runs factor by factor.
    pub fn new(model: &Model) -> Result<Self> {
        let shape = model.shape().clone();
        let density = model.state().density(&shape);
        let mut rows = Matrix::identity(1, 1);
        let mut factors = Vec::with_capacity(shape.len());
        for (k, &d) in shape.factor_dims().iter().enumerate() {
            let rho = match model.state() {
                StateSpec::Trace => Matrix::identity(d, d).scale(1.0 / d as f64),
                StateSpec::ProductDensities(rhos) => rhos[k].clone(),
            };
            let factor = gram_schmidt(&rho.transpose()).map_err(|col| {
                Error::InvalidState(format!(
                    "state is not faithful: matrix unit column {col} of factor {k} has zero GNS norm"
                ))
            })?;
            rows = linalg::kron(&rows, &factor);
            factors.push(rho * factor.map(|z| z.conj()));
        }
        Ok(GnsBasis {
            shape,
            density,
            rows,
            factors,
        })
    }

    /// `D = N²`.
    pub fn dim(&self) -> usize {
        let n = self.shape.dim();
        n * n
    }

    /// Basis vector `k = i·N + j`, the element `e_i w_j^T`.
    pub fn vector(&self, k: usize) -> Element {
        let n = self.shape.dim();
        let (i, j) = (k / n, k % n);
        let mut m = Matrix::zeros(n, n);
        for col in 0..n {
            m[(i, col)] = self.rows[(col, j)];
        }
        Element::from_matrix(&self.shape, m).expect("basis vector has chain dimension")
    }

    /// Coordinates `⟨x, b_k⟩` in the orthonormal basis.
    pub fn coords(&self, x: &Element) -> DVector<Complex64> {
        let n = self.shape.dim();
        let c = x.matrix() * &self.density * self.rows.map(|z| z.conj());
        DVector::from_fn(n * n, |k, _| c[(k / n, k % n)])
    }

    pub fn from_coords(&self, coords: &DVector<Complex64>) -> Element {
        let n = self.shape.dim();
        let c = Matrix::from_fn(n, n, |i, j| coords[i * n + j]);
        Element::from_matrix(&self.shape, c * self.rows.transpose())
            .expect("coordinates have basis dimension")
    }

    /// Matrix of the conditional expectation onto the first `level` factors.
    /// In coordinates `X = x L` it acts as `X ↦ Tr_B(X (1 ⊗ L_B*)) ⊗ L_B`,
    /// where `L_B` has unit Hilbert–Schmidt norm, so no inverse of the
    /// density enters.
    pub fn level_projection(&self, level: usize) -> Result<GnsOperator> {
        if level > self.shape.len() {
            return Err(Error::FactorOutOfRange {
                index: level,
                len: self.shape.len(),
            });
        }
        let n = self.shape.dim();
        let nb = self.shape.suffix_dim(level);
        let na = n / nb;
        let lb = self.factors[level..]
            .iter()
            .fold(Matrix::identity(1, 1), |acc, l| linalg::kron(&acc, l));
        let mut m = Matrix::zeros(n * n, n * n);
        for a in 0..na {
            for a2 in 0..na {
                for b in 0..nb {
                    for b2 in 0..nb {
                        let row = (a * nb + b) * n + a2 * nb + b2;
                        for c in 0..nb {
                            for c2 in 0..nb {
                                let col = (a * nb + c) * n + a2 * nb + c2;
                                m[(row, col)] = lb[(b, b2)] * lb[(c, c2)].conj();
                            }
                        }
                    }
                }
            }
        }
        Ok(GnsOperator(m))
    }

    /// Matrix of a linear map on the GNS space.
    pub fn operator<F>(&self, map: F) -> Result<GnsOperator>
    where
        F: Fn(&Element) -> Result<Element>,
    {
        let d = self.dim();
        let mut m = Matrix::zeros(d, d);
        for k in 0..d {
            let image = map(&self.vector(k))?;
            m.set_column(k, &self.coords(&image));
        }
        Ok(GnsOperator(m))
    }

    /// Left multiplication `xΩ ↦ a x Ω`, the GNS representation of `a`. In
    /// coordinates `X = x L` it is `X ↦ a X`, i.e. the matrix `a ⊗ 1`.
    pub fn left_multiplication(&self, a: &Element) -> GnsOperator {
        let n = self.shape.dim();
        GnsOperator(linalg::kron(a.matrix(), &Matrix::identity(n, n)))
    }

    /// Right multiplication `xΩ ↦ x y Ω`; in the tracial case these realize the commutant.
    pub fn right_multiplication(&self, y: &Element) -> GnsOperator {
        self.operator(|x| Ok(x * y))
            .expect("right multiplication is total")
    }
}

/// Modified Gram–Schmidt of the standard basis under `⟨u, v⟩ = v* G u`. On
/// failure returns the first column with vanishing norm.
fn gram_schmidt(metric: &Matrix) -> std::result::Result<Matrix, usize> {
    let n = metric.nrows();
    let inner = |u: &DVector<Complex64>, v: &DVector<Complex64>| v.dotc(&(metric * u));
    let mut rows = Matrix::zeros(n, n);
    for j in 0..n {
        let mut w = DVector::<Complex64>::zeros(n);
        w[j] = linalg::ONE;
        for k in 0..j {
            let prev: DVector<Complex64> = rows.column(k).into_owned();
            let proj = inner(&w, &prev);
            w -= prev * proj;
        }
        let norm2 = inner(&w, &w).re;
        if norm2 <= f64::EPSILON * f64::EPSILON {
            return Err(j);
        }
        rows.set_column(j, &(w / Complex64::new(norm2.sqrt(), 0.0)));
    }
    Ok(rows)
}

/// A linear operator on the GNS space, as a `D × D` matrix in a fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GnsOperator(pub Matrix);

impl GnsOperator {
    pub fn identity(dim: usize) -> Self {
        GnsOperator(Matrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        GnsOperator(Matrix::zeros(dim, dim))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        GnsOperator(self.0.adjoint())
    }

    pub fn apply(&self, coords: &DVector<Complex64>) -> DVector<Complex64> {
        &self.0 * coords
    }

    /// Apply to a vector given as an element, returning an element.
    pub fn apply_element(&self, basis: &GnsBasis, v: &Element) -> Element {
        basis.from_coords(&self.apply(&basis.coords(v)))
    }

    pub fn operator_norm(&self) -> f64 {
        linalg::operator_norm(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.0)
    }

    pub fn self_adjoint_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.0)
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.0)
    }

    pub fn max_abs_diff(&self, other: &GnsOperator) -> f64 {
        linalg::max_abs_diff(&self.0, &other.0)
    }
}

impl Add for &GnsOperator {
    type Output = GnsOperator;
    fn add(self, rhs: &GnsOperator) -> GnsOperator {
        GnsOperator(&self.0 + &rhs.0)
    }
}

impl Sub for &GnsOperator {
    type Output = GnsOperator;
    fn sub(self, rhs: &GnsOperator) -> GnsOperator {
        GnsOperator(&self.0 - &rhs.0)
    }
}

impl Mul for &GnsOperator {
    type Output = GnsOperator;
    fn mul(self, rhs: &GnsOperator) -> GnsOperator {
        GnsOperator(&self.0 * &rhs.0)
    }
}
