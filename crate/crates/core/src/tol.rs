//! Numerical tolerances shared by every module.

use serde::Serialize;

/// Letter and state normalization.
pub const NORM: f64 = 1e-9;
/// Orthonormality of basis vectors and eigenvectors.
pub const ORTH: f64 = 1e-9;
/// Probability vectors summing to one.
pub const PROB: f64 = 1e-9;
/// Unit trace of density operators.
pub const TRACE: f64 = 1e-9;
/// Smallest admissible eigenvalue of a density operator.
pub const PSD: f64 = 1e-9;
/// Max-entry reconstruction error of spectral decompositions.
pub const RECON: f64 = 1e-8;
/// Hermiticity of internally constructed operators.
pub const HERM: f64 = 1e-10;
/// Hermiticity slack accepted for user-supplied observables before symmetrizing.
pub const HERM_INPUT: f64 = 1e-8;
/// Residual norm below which a vector is linearly dependent.
pub const RANK: f64 = 1e-10;
/// Sparse amplitudes at or below this modulus are dropped.
pub const AMP: f64 = 1e-12;
/// Imaginary part discarded from expectation values.
pub const IMAG: f64 = 1e-9;
/// Eigenvalues at or below this are treated as zero.
pub const EIG: f64 = 1e-12;
/// Frobenius off-block weight below which a matrix is block diagonal.
pub const BLOCK: f64 = 1e-10;

/// Largest total dimension for which dense operators are built.
pub const DENSE_CAP: usize = 4096;

/// Snapshot of the active tolerances, written into every report.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub norm: f64,
    pub orth: f64,
    pub prob: f64,
    pub trace: f64,
    pub psd: f64,
    pub recon: f64,
    pub herm: f64,
    pub herm_input: f64,
    pub rank: f64,
    pub amp: f64,
    pub imag: f64,
    pub eig: f64,
    pub block: f64,
    pub dense_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: NORM,
            orth: ORTH,
            prob: PROB,
            trace: TRACE,
            psd: PSD,
            recon: RECON,
            herm: HERM,
            herm_input: HERM_INPUT,
            rank: RANK,
            amp: AMP,
            imag: IMAG,
            eig: EIG,
            block: BLOCK,
            dense_cap: DENSE_CAP,
        }
    }
}
