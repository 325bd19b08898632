//! Small dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
///
/// Column `i` of the returned matrix is the eigenvector of eigenvalue `i`.
/// Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn real_dvector(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `|v⟩⟨v|` scaled by `weight`.
pub fn weighted_outer(v: &CVector, weight: f64) -> CMatrix {
    v * v.adjoint() * Complex64::new(weight, 0.0)
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
///
/// Inputs are processed in order; a vector whose residual norm is at or
/// below `threshold` is discarded. Returns the orthonormal vectors kept.
pub fn gram_schmidt<V, D, S, N>(inputs: &[V], threshold: f64, dot: D, sub: S, scale: N) -> Vec<V>
where
    V: Clone,
    D: Fn(&V, &V) -> Complex64,
    S: Fn(&mut V, Complex64, &V),
    N: Fn(&mut V, f64),
{
    let mut basis: Vec<V> = Vec::new();
    for v in inputs {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &r);
                sub(&mut r, c, b);
            }
        }
        let norm = dot(&r, &r).re.max(0.0).sqrt();
        if norm > threshold {
            scale(&mut r, 1.0 / norm);
            basis.push(r);
        }
    }
    basis
}

/// Gram-Schmidt specialised to dense vectors.
pub fn orthonormalize(inputs: &[CVector], threshold: f64) -> Vec<CVector> {
    gram_schmidt(
        inputs,
        threshold,
        |a, b| a.dotc(b),
        |r, c, b| r.axpy(-c, b, ONE),
        |r, s| *r *= Complex64::new(s, 0.0),
    )
}
