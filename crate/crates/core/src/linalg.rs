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

//! Dense complex matrix helpers shared by the algebra, GNS and process code.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Dense complex matrix, the storage type behind every operator in the crate.
pub type Matrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Kronecker product `a ⊗ b` with `a` as the most significant factor.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "matrix shapes differ");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Deviation from hermiticity, `max |m - m*|`.
pub fn hermitian_defect(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Symmetrize so the eigensolver only ever sees an exactly hermitian input.
fn hermitian_part(m: &Matrix) -> Matrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a hermitian matrix, ascending.
pub fn eigvalsh(m: &Matrix) -> Vec<f64> {
    let mut vals: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Spectral projections of a hermitian matrix, grouping eigenvalues closer
/// than `cluster_tol` into one eigenspace. Returned ascending by eigenvalue.
pub fn spectral_projections(m: &Matrix, cluster_tol: f64) -> Vec<(f64, Matrix)> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let n = m.nrows();
    let mut out: Vec<(f64, Matrix, usize)> = Vec::new();
    for idx in order {
        let lambda = eig.eigenvalues[idx];
        let v = eig.eigenvectors.column(idx);
        let rank_one = v * v.adjoint();
        match out.last_mut() {
            Some((mean, proj, count)) if (lambda - *mean).abs() <= cluster_tol => {
                *mean = (*mean * *count as f64 + lambda) / (*count as f64 + 1.0);
                *proj += rank_one;
                *count += 1;
            }
            _ => out.push((lambda, Matrix::zeros(n, n) + rank_one, 1)),
        }
    }
    out.into_iter().map(|(l, p, _)| (l, p)).collect()
}

/// Operator norm (largest singular value), via the eigenvalues of `m* m`.
pub fn operator_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    eigvalsh(&gram)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// Smallest eigenvalue of a hermitian matrix.
pub fn min_eigenvalue(m: &Matrix) -> f64 {
    eigvalsh(m).first().copied().unwrap_or(0.0)
}

pub fn trace(m: &Matrix) -> Complex64 {
    m.trace()
}

/// `Tr(a b)` without forming the product.
pub fn trace_of_product(a: &Matrix, b: &Matrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn pauli_x() -> Matrix {
    Matrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> Matrix {
    Matrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> Matrix {
    Matrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> Matrix {
    let n = values.len();
    let mut m = Matrix::zeros(n, n);
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = c(*v, 0.0);
    }
    m
}
