//! Length and basis-alphabet measurements, with seeded Monte Carlo sampling.
//!
//! Randomness comes from ChaCha8 keyed by the 64-bit seed (little-endian in
//! the first eight key bytes, remaining key bytes zero). Trials are grouped in
//! chunks of [`CHUNK`]; chunk `c` uses stream `c` of that key, so the outcome
//! of every trial is fixed by `(seed, trial index)` regardless of how chunks
//! are scheduled across threads. Each trial consumes one `u64`, mapped to
//! `[0, 1)` as `(x >> 11) · 2⁻⁵³`, and picks an outcome by inverse CDF over
//! the enumeration order (sectors ascending, or strings ascending by global
//! index). A single-shot measurement is trial 0.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ensembles::MessageMatrix;
use crate::error::{Error, Result};
use crate::mstate::{BasisString, ManyLetterState, SpaceShape};

/// Trials per random stream.
pub const CHUNK: usize = 4096;

/// A pure or mixed message on `M^N`.
#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    Pure(ManyLetterState),
    Mixed(MessageMatrix),
}

impl Message {
    pub fn shape(&self) -> SpaceShape {
        match self {
            Message::Pure(s) => s.shape(),
            Message::Mixed(m) => m.shape(),
        }
    }

    /// `p_n = ‖Π_n φ‖²` or `Tr{Π_n σ}` for every `n = 0..=N`.
    pub fn sector_probabilities(&self) -> Vec<f64> {
        match self {
            Message::Pure(s) => s.sector_weights(),
            Message::Mixed(m) => m.sector_probabilities(),
        }
    }

    /// `(global index, probability)` of each basis string with nonzero weight.
    fn string_probabilities(&self) -> Vec<(usize, f64)> {
        match self {
            Message::Pure(s) => s.iter_indexed().map(|(i, a)| (i, a.norm_sqr())).collect(),
            Message::Mixed(m) => m
                .basis_probabilities()
                .into_iter()
                .enumerate()
                .filter(|(_, p)| *p > 0.0)
                .collect(),
        }
    }

    fn require_normalized(&self) -> Result<()> {
        match self {
            Message::Pure(s) => s.require_normalized(),
            Message::Mixed(_) => Ok(()),
        }
    }
}

impl From<ManyLetterState> for Message {
    fn from(s: ManyLetterState) -> Self {
        Message::Pure(s)
    }
}

impl From<MessageMatrix> for Message {
    fn from(m: MessageMatrix) -> Self {
        Message::Mixed(m)
    }
}

/// What a measurement reports.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeValue {
    Length(usize),
    String(BasisString),
}

impl OutcomeValue {
    /// Length of the message observed.
    pub fn length(&self) -> usize {
        match self {
            OutcomeValue::Length(n) => *n,
            OutcomeValue::String(s) => s.len(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            OutcomeValue::Length(n) => n.to_string(),
            OutcomeValue::String(s) => s.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub value: OutcomeValue,
    pub probability: f64,
    pub post_state: Message,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    Length,
    Basis,
}

/// Nonzero `(n, p_n)` pairs, ascending in `n`.
pub fn length_outcome_distribution(input: &Message) -> Result<Vec<(usize, f64)>> {
    input.require_normalized()?;
    Ok(input
        .sector_probabilities()
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .collect())
}

/// Nonzero `(a^n, p(a^n))` pairs in enumeration order: `|φ(a^n)|²` or `⟨a^n|σ|a^n⟩`.
pub fn basis_outcome_distribution(input: &Message) -> Result<Vec<(BasisString, f64)>> {
    input.require_normalized()?;
    let shape = input.shape();
    Ok(input
        .string_probabilities()
        .into_iter()
        .map(|(i, p)| (shape.from_index(i).expect("valid index"), p))
        .collect())
}

/// `Σ_n Π_n σ Π_n`.
pub fn dephase_length(sigma: &MessageMatrix) -> MessageMatrix {
    sigma.dephased()
}

/// Uniform draws in `[0, 1)` for trials `start..start + count` of `seed`.
fn uniforms(seed: u64, chunk: usize, count: usize) -> impl Iterator<Item = f64> {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(chunk as u64);
    (0..count).map(move |_| (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
}

/// Inverse-CDF sampler over a finite list of weights.
struct Sampler {
    cumulative: Vec<f64>,
}

impl Sampler {
    fn new(weights: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .into_iter()
            .map(|w| {
                acc += w.max(0.0);
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn pick(&self, u: f64) -> usize {
        let total = *self.cumulative.last().expect("non-empty distribution");
        let target = u * total;
        let i = self.cumulative.partition_point(|&c| c <= target);
        if i < self.cumulative.len() {
            return i;
        }
        // u·total rounded up to total: fall back to the last outcome with weight
        let last = self.cumulative.len() - 1;
        (0..=last)
            .rev()
            .find(|&j| j == 0 || self.cumulative[j] > self.cumulative[j - 1])
            .unwrap_or(last)
    }
}

struct Outcomes {
    values: Vec<OutcomeValue>,
    probabilities: Vec<f64>,
}

fn outcomes(input: &Message, kind: MeasurementKind) -> Result<Outcomes> {
    input.require_normalized()?;
    let (values, probabilities): (Vec<_>, Vec<_>) = match kind {
        MeasurementKind::Length => length_outcome_distribution(input)?
            .into_iter()
            .map(|(n, p)| (OutcomeValue::Length(n), p))
            .unzip(),
        MeasurementKind::Basis => basis_outcome_distribution(input)?
            .into_iter()
            .map(|(s, p)| (OutcomeValue::String(s), p))
            .unzip(),
    };
    if values.is_empty() {
        return Err(Error::ZeroNorm("message has no weight to measure".into()));
    }
    Ok(Outcomes { values, probabilities })
}

fn post_state(input: &Message, value: &OutcomeValue) -> Result<Message> {
    let shape = input.shape();
    Ok(match (value, input) {
        // a message of definite length is left exactly as it was
        (OutcomeValue::Length(n), Message::Pure(s)) if s.definite_length() == Some(*n) => input.clone(),
        (OutcomeValue::Length(n), Message::Mixed(m))
            if m.sector_probabilities().iter().enumerate().all(|(k, p)| k == *n || *p == 0.0) =>
        {
            input.clone()
        }
        (OutcomeValue::Length(n), Message::Pure(s)) => Message::Pure(s.project_length(*n).normalize()?),
        (OutcomeValue::Length(n), Message::Mixed(m)) => Message::Mixed(m.project_length(*n)?),
        (OutcomeValue::String(s), _) => Message::Pure(ManyLetterState::basis_state(shape, s)?),
    })
}

fn measure(input: &Message, kind: MeasurementKind, seed: u64) -> Result<MeasurementOutcome> {
    let o = outcomes(input, kind)?;
    let sampler = Sampler::new(o.probabilities.iter().copied());
    let u = uniforms(seed, 0, 1).next().expect("one draw");
    let i = sampler.pick(u);
    assert!(o.probabilities[i] > 0.0, "sampled an outcome of zero probability");
    let value = o.values[i].clone();
    Ok(MeasurementOutcome {
        post_state: post_state(input, &value)?,
        probability: o.probabilities[i],
        value,
    })
}

/// Measures `L̂`; the post-state is the renormalized projection on the observed sector.
pub fn measure_length(input: &Message, seed: u64) -> Result<MeasurementOutcome> {
    measure(input, MeasurementKind::Length, seed)
}

/// Measures in the basis-alphabet string basis; the post-state is `|a^n⟩`.
pub fn measure_basis(input: &Message, seed: u64) -> Result<MeasurementOutcome> {
    measure(input, MeasurementKind::Basis, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub value: OutcomeValue,
    pub count: u64,
    pub freq: f64,
    /// Exact probability of this outcome.
    pub probability: f64,
}

/// Outcome counts of repeated measurements on fresh copies of a message.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub kind: MeasurementKind,
    /// Bins with nonzero count, in enumeration order.
    pub bins: Vec<HistogramBin>,
    pub trials: u64,
    pub seed: u64,
    pub mean_length: f64,
    pub variance_length: f64,
}

impl Histogram {
    pub fn count(&self, value: &OutcomeValue) -> u64 {
        self.bins.iter().find(|b| &b.value == value).map_or(0, |b| b.count)
    }
}

/// Runs `trials` independent measurements of the given kind.
pub fn sample_statistics(input: &Message, kind: MeasurementKind, trials: u64, seed: u64) -> Result<Histogram> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let o = outcomes(input, kind)?;
    let sampler = Sampler::new(o.probabilities.iter().copied());
    let trials_usize = usize::try_from(trials).map_err(|_| Error::ResourceCap("too many trials".into()))?;
    let chunks = trials_usize.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(trials_usize - c * CHUNK);
            let mut local = vec![0u64; o.values.len()];
            for u in uniforms(seed, c, count) {
                local[sampler.pick(u)] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; o.values.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let total = trials as f64;
    let mut mean = 0.0;
    for (v, &c) in o.values.iter().zip(&counts) {
        mean += v.length() as f64 * c as f64;
    }
    mean /= total;
    let mut var = 0.0;
    for (v, &c) in o.values.iter().zip(&counts) {
        let d = v.length() as f64 - mean;
        var += d * d * c as f64;
    }
    var /= total;

    let bins = o
        .values
        .into_iter()
        .zip(o.probabilities)
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .map(|((value, probability), count)| HistogramBin {
            value,
            count,
            freq: count as f64 / total,
            probability,
        })
        .collect();
    Ok(Histogram { kind, bins, trials, seed, mean_length: mean, variance_length: var })
}
