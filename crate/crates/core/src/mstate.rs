//! States of the truncated many-letter space.
//!
//! The space is the direct sum of the block spaces `H^n` for `n = 0..=N`, each
//! spanned by basis strings of length `n` over a basis alphabet of size `K`.
//! Strings are linearized in ascending length, then ascending big-endian
//! mixed-radix value: the length-`n` sector starts at offset `Σ_{m<n} K^m`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::letterspace::QuantumAlphabet;
use crate::linalg::{CVector, ZERO};
use crate::tol;

/// Size data of `M^N`: basis size `K`, maximum length `N` and total dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceShape {
    k: usize,
    max_len: usize,
    dim: usize,
}

impl SpaceShape {
    pub fn new(k: usize, max_len: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("basis alphabet size must be >= 1"));
        }
        let mut dim: usize = 0;
        let mut block: usize = 1;
        for n in 0..=max_len {
            dim = dim
                .checked_add(block)
                .ok_or_else(|| Error::ResourceCap(format!("space K={k}, N={max_len} overflows")))?;
            if n < max_len {
                block = block
                    .checked_mul(k)
                    .ok_or_else(|| Error::ResourceCap(format!("space K={k}, N={max_len} overflows")))?;
            }
        }
        Ok(Self { k, max_len, dim })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Total dimension `D = Σ_{n=0}^{N} K^n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `K^n`, the dimension of the length-`n` sector.
    pub fn sector_dim(&self, n: usize) -> usize {
        self.k.pow(n as u32)
    }

    /// Global index of the first string of length `n`.
    pub fn offset(&self, n: usize) -> usize {
        (0..n).map(|m| self.sector_dim(m)).sum()
    }

    /// Global index range of the length-`n` sector.
    pub fn sector_range(&self, n: usize) -> std::ops::Range<usize> {
        let start = self.offset(n);
        start..start + self.sector_dim(n)
    }

    pub fn check_string(&self, s: &BasisString) -> Result<()> {
        if s.len() > self.max_len {
            return Err(Error::OutOfRange(format!(
                "string of length {} exceeds maximum length {}",
                s.len(),
                self.max_len
            )));
        }
        if let Some(d) = s.digits().iter().find(|&&d| d >= self.k) {
            return Err(Error::OutOfRange(format!("digit {d} not below K={}", self.k)));
        }
        Ok(())
    }

    pub fn global_index(&self, s: &BasisString) -> Result<usize> {
        self.check_string(s)?;
        Ok(self.offset(s.len()) + s.value(self.k))
    }

    pub fn from_index(&self, index: usize) -> Result<BasisString> {
        if index >= self.dim {
            return Err(Error::OutOfRange(format!("index {index} not below D={}", self.dim)));
        }
        let (n, value) = self.locate(index);
        Ok(BasisString::from_value(self.k, n, value))
    }

    /// Sector length and in-sector value of a global index below `dim`.
    pub(crate) fn locate(&self, index: usize) -> (usize, usize) {
        let mut rest = index;
        let mut n = 0;
        loop {
            let block = self.sector_dim(n);
            if rest < block {
                return (n, rest);
            }
            rest -= block;
            n += 1;
        }
    }

    /// Length of the string at each global index, in enumeration order.
    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.max_len).flat_map(move |n| std::iter::repeat(n).take(self.sector_dim(n)))
    }

    /// Same `K`, different maximum length.
    pub fn with_max_len(&self, max_len: usize) -> Result<Self> {
        Self::new(self.k, max_len)
    }
}

/// A definite-length word over the basis alphabet. The empty word is the
/// empty message.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisString {
    digits: Vec<usize>,
}

impl BasisString {
    pub fn new(digits: Vec<usize>) -> Self {
        Self { digits }
    }

    pub fn empty() -> Self {
        Self { digits: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    /// Big-endian mixed-radix value in base `k`.
    pub fn value(&self, k: usize) -> usize {
        self.digits.iter().fold(0, |acc, &d| acc * k + d)
    }

    pub fn from_value(k: usize, len: usize, mut value: usize) -> Self {
        let mut digits = vec![0; len];
        for slot in digits.iter_mut().rev() {
            *slot = value % k;
            value /= k;
        }
        Self { digits }
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// Sparse amplitude vector over basis strings of mixed lengths.
///
/// Keys are `(length, mixed-radix value)`, so map order is enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyLetterState {
    shape: SpaceShape,
    amps: BTreeMap<(usize, usize), Complex64>,
    normalized: bool,
}

impl ManyLetterState {
    fn from_map(shape: SpaceShape, mut amps: BTreeMap<(usize, usize), Complex64>) -> Self {
        amps.retain(|_, a| a.norm() > tol::AMP);
        Self { shape, amps, normalized: false }
    }

    /// Unnormalized state from `(string, amplitude)` pairs; repeated strings add.
    pub fn from_terms<I>(shape: SpaceShape, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisString, Complex64)>,
    {
        let mut amps = BTreeMap::new();
        for (s, a) in terms {
            shape.check_string(&s)?;
            *amps.entry((s.len(), s.value(shape.k))).or_insert(ZERO) += a;
        }
        Ok(Self::from_map(shape, amps))
    }

    /// Normalized state from `(string, amplitude)` pairs.
    pub fn from_terms_normalized<I>(shape: SpaceShape, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisString, Complex64)>,
    {
        Self::from_terms(shape, terms)?.normalize()
    }

    /// The basis state `|a^n⟩`.
    pub fn basis_state(shape: SpaceShape, s: &BasisString) -> Result<Self> {
        Self::from_terms_normalized(shape, [(s.clone(), Complex64::new(1.0, 0.0))])
    }

    /// The empty message `|·⟩`.
    pub fn empty_message(shape: SpaceShape) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert((0, 0), Complex64::new(1.0, 0.0));
        Self { shape, amps, normalized: true }
    }

    /// Product message `|x_1 … x_n⟩` expanded in basis-alphabet coordinates.
    pub fn product_message(alphabet: &QuantumAlphabet, shape: SpaceShape, letters: &[usize]) -> Result<Self> {
        if shape.k != alphabet.rank() {
            return Err(Error::shape(format!(
                "space has K={} but alphabet has rank {}",
                shape.k,
                alphabet.rank()
            )));
        }
        if letters.len() > shape.max_len {
            return Err(Error::OutOfRange(format!(
                "product of {} letters exceeds maximum length {}",
                letters.len(),
                shape.max_len
            )));
        }
        let k = shape.k;
        let mut current: Vec<(usize, Complex64)> = vec![(0, Complex64::new(1.0, 0.0))];
        for &x in letters {
            let coords = alphabet.expand_letter(x)?;
            let mut next = Vec::with_capacity(current.len() * k);
            for &(value, amp) in &current {
                for (digit, c) in coords.iter().enumerate() {
                    let a = amp * c;
                    if a.norm() > tol::AMP {
                        next.push((value * k + digit, a));
                    }
                }
            }
            current = next;
        }
        let n = letters.len();
        let amps = current.into_iter().map(|(v, a)| ((n, v), a)).collect();
        Self::from_map(shape, amps).normalize()
    }

    /// State from a dense vector indexed in enumeration order.
    pub fn from_dense(shape: SpaceShape, v: &CVector) -> Result<Self> {
        if v.len() != shape.dim {
            return Err(Error::shape(format!("vector of length {} for D={}", v.len(), shape.dim)));
        }
        let amps = v.iter().enumerate().map(|(i, &a)| (shape.locate(i), a)).collect();
        Ok(Self::from_map(shape, amps))
    }

    pub fn shape(&self) -> SpaceShape {
        self.shape
    }

    /// Whether this state was produced as (or checked to be) unit norm.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Number of stored nonzero amplitudes.
    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    /// Rescales to unit norm; fails on a zero vector.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm <= tol::AMP {
            return Err(Error::ZeroNorm(format!("state norm {norm:e}")));
        }
        for a in self.amps.values_mut() {
            *a /= norm;
        }
        self.normalized = true;
        Ok(self)
    }

    /// Requires unit norm within tolerance, marking the state normalized.
    pub fn checked_normalized(mut self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > tol::NORM {
            return Err(Error::invalid(format!("state has squared norm {n2}, expected 1")));
        }
        self.normalized = true;
        Ok(self)
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.normalized || (self.norm_sqr() - 1.0).abs() <= tol::NORM {
            Ok(())
        } else {
            Err(Error::invalid("state is not normalized"))
        }
    }

    /// Pointwise linear combination, optionally renormalized.
    pub fn superpose(terms: &[(Complex64, &ManyLetterState)], normalize: bool) -> Result<Self> {
        let (_, first) = terms.first().ok_or_else(|| Error::invalid("superposition of no terms"))?;
        let shape = first.shape;
        let mut amps: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (c, state) in terms {
            if state.shape != shape {
                return Err(Error::shape("superposed states have different shapes"));
            }
            for (&key, &a) in &state.amps {
                *amps.entry(key).or_insert(ZERO) += c * a;
            }
        }
        let out = Self::from_map(shape, amps);
        if normalize {
            out.normalize()
        } else {
            Ok(out)
        }
    }

    /// `⟨self|other⟩`, summed over shared basis strings only.
    pub fn inner_product(&self, other: &ManyLetterState) -> Result<Complex64> {
        if self.shape != other.shape {
            return Err(Error::shape("inner product of states with different shapes"));
        }
        let (small, large, swap) = if self.amps.len() <= other.amps.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = ZERO;
        for (key, a) in &small.amps {
            if let Some(b) = large.amps.get(key) {
                acc += if swap { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    /// `φ(a^n) = ⟨a^n|φ⟩`.
    pub fn wave_component(&self, s: &BasisString) -> Result<Complex64> {
        self.shape.check_string(s)?;
        Ok(self.amps.get(&(s.len(), s.value(self.shape.k))).copied().unwrap_or(ZERO))
    }

    /// Squared norm carried by strings longer than `max_len`.
    pub fn discarded_weight(&self, max_len: usize) -> f64 {
        self.amps.range((max_len + 1, 0)..).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Drops strings longer than `max_len` and renormalizes in `M^{max_len}`.
    ///
    /// Returns the new state and the squared norm that was discarded.
    pub fn truncate(&self, max_len: usize) -> Result<(Self, f64)> {
        let discarded = self.discarded_weight(max_len) / self.norm_sqr();
        let shape = self.shape.with_max_len(max_len)?;
        let amps = self.amps.range(..(max_len + 1, 0)).map(|(&k, &a)| (k, a)).collect();
        let kept = Self::from_map(shape, amps);
        if kept.amps.is_empty() {
            return Err(Error::ZeroNorm(format!(
                "truncation to length {max_len} discards weight {discarded}"
            )));
        }
        Ok((kept.normalize()?, discarded))
    }

    /// The same vector viewed in `M^{max_len}`; fails if support would be lost.
    pub fn embed(&self, max_len: usize) -> Result<Self> {
        if self.discarded_weight(max_len) > 0.0 {
            return Err(Error::OutOfRange(format!("state has strings longer than {max_len}")));
        }
        let shape = self.shape.with_max_len(max_len)?;
        Ok(Self { shape, amps: self.amps.clone(), normalized: self.normalized })
    }

    /// `Π_n φ`, left unnormalized.
    pub fn project_length(&self, n: usize) -> Self {
        let amps = self.amps.range((n, 0)..(n + 1, 0)).map(|(&k, &a)| (k, a)).collect();
        Self { shape: self.shape, amps, normalized: false }
    }

    /// `‖Π_n φ‖²` for `n = 0..=N`.
    pub fn sector_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.shape.max_len + 1];
        for (&(n, _), a) in &self.amps {
            w[n] += a.norm_sqr();
        }
        w
    }

    /// The lengths carrying nonzero amplitude, ascending.
    pub fn lengths_present(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.amps.keys().map(|&(n, _)| n).collect();
        out.dedup();
        out
    }

    /// `Some(n)` when all amplitude sits in a single sector.
    pub fn definite_length(&self) -> Option<usize> {
        match self.lengths_present().as_slice() {
            [n] => Some(*n),
            _ => None,
        }
    }

    /// Nonzero amplitudes in enumeration order.
    pub fn iter(&self) -> impl Iterator<Item = (BasisString, Complex64)> + '_ {
        let k = self.shape.k;
        self.amps.iter().map(move |(&(n, v), &a)| (BasisString::from_value(k, n, v), a))
    }

    /// Nonzero amplitudes keyed by global index, in enumeration order.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amps.iter().map(move |(&(n, v), &a)| (self.shape.offset(n) + v, a))
    }

    pub fn to_dense(&self) -> CVector {
        let mut v = CVector::zeros(self.shape.dim);
        for (i, a) in self.iter_indexed() {
            v[i] = a;
        }
        v
    }
}
