//! Dense reference computations with explicit loops over the full basis.
//!
//! Nothing here calls into the library's indexing, matrix or measurement
//! code; strings are listed by brute force and looked up by linear search.

use num_complex::Complex64;

pub type Dense = Vec<Vec<Complex64>>;

const Z: Complex64 = Complex64::new(0.0, 0.0);

/// Every string of length `0..=n_max` over `k` digits, by length then lexicographically.
pub fn basis(k: usize, n_max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n_max {
        let mut next = Vec::new();
        for s in &layer {
            for d in 0..k {
                let mut t = s.clone();
                t.push(d);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn position(basis: &[Vec<usize>], s: &[usize]) -> usize {
    basis.iter().position(|b| b == s).expect("string in basis")
}

/// Dense, normalized vector from sparse `(digits, amplitude)` terms.
pub fn state(basis: &[Vec<usize>], terms: &[(Vec<usize>, Complex64)]) -> Vec<Complex64> {
    let mut v = vec![Z; basis.len()];
    for (s, a) in terms {
        v[position(basis, s)] += a;
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

pub fn message_matrix(entries: &[(Vec<Complex64>, f64)]) -> Dense {
    let d = entries[0].0.len();
    let mut m = vec![vec![Z; d]; d];
    for (v, p) in entries {
        for i in 0..d {
            for j in 0..d {
                m[i][j] += v[i] * v[j].conj() * p;
            }
        }
    }
    m
}

pub fn expected_length(basis: &[Vec<usize>], sigma: &Dense) -> f64 {
    (0..basis.len()).map(|i| sigma[i][i].re * basis[i].len() as f64).sum()
}

pub fn pure_expected_length(basis: &[Vec<usize>], v: &[Complex64]) -> f64 {
    (0..basis.len()).map(|i| v[i].norm_sqr() * basis[i].len() as f64).sum()
}

pub fn length_distribution(basis: &[Vec<usize>], sigma: &Dense, n_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    for i in 0..basis.len() {
        out[basis[i].len()] += sigma[i][i].re;
    }
    out
}

/// Length-`n` block (rows/cols with strings of length `n`, in basis order).
pub fn block(basis: &[Vec<usize>], sigma: &Dense, n: usize) -> Dense {
    let idx: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].len() == n).collect();
    idx.iter().map(|&i| idx.iter().map(|&j| sigma[i][j]).collect()).collect()
}

pub fn off_block_residual(basis: &[Vec<usize>], sigma: &Dense) -> f64 {
    let mut acc = 0.0;
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if basis[i].len() != basis[j].len() {
                acc += sigma[i][j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![Z; ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn power(a: &Dense, n: usize) -> Dense {
    let mut out = vec![vec![Complex64::new(1.0, 0.0)]];
    for _ in 0..n {
        out = kron(&out, a);
    }
    out
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    let mut worst: f64 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            worst = worst.max((x - y).norm());
        }
    }
    worst
}

pub fn frobenius_diff(a: &Dense, b: &Dense) -> f64 {
    let mut acc = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            acc += (x - y).norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn scale(a: &Dense, s: f64) -> Dense {
    a.iter().map(|r| r.iter().map(|z| z * s).collect()).collect()
}
