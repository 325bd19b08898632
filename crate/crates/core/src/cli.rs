//! Command-line front end: load JSON inputs, run an analysis, emit a JSON report.
//!
//! Exit codes: 0 success (or equivalent), 1 not equivalent, 2 parse error,
//! 3 validation error, 4 resource cap exceeded.

use std::io;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::measurement::{sample_statistics, Histogram, MeasurementKind};
use crate::operators::expected_length;
use crate::spec::{self, InputDigest, MessageSource, SourceKind};
use crate::tol::Tolerances;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default Frobenius tolerance for `equiv`.
pub const DEFAULT_EQUIV_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "manyletter", version, about = "Variable-length quantum message analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gram matrix, rank and basis alphabet of an alphabet file.
    Alphabet(AlphabetArgs),
    /// Length statistics, spectrum and block structure of an ensemble file.
    Stats(StatsArgs),
    /// Compare the message matrices of two ensemble files.
    Equiv(EquivArgs),
    /// Monte Carlo length or basis measurements of an ensemble file.
    Measure(MeasureArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AlphabetArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Override the maximum message length N.
    #[arg(long)]
    pub max_length: Option<usize>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub input2: PathBuf,
    /// Frobenius distance at or below which the ensembles are equivalent.
    #[arg(long, default_value_t = DEFAULT_EQUIV_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub max_length: Option<usize>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Length,
    Basis,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Length)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_length: Option<usize>,
    #[command(flatten)]
    pub out: Output,
}

/// A finished command: its JSON report and process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
    pub output: Option<PathBuf>,
}

fn header(command: &str, inputs: &[InputDigest], tolerances: &Tolerances) -> Value {
    json!({
        "tool": "manyletter",
        "version": VERSION,
        "command": command,
        "inputs": inputs,
        "tolerances": tolerances,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, extra) {
        a.extend(b);
    }
    base
}

fn complex_matrix(m: &crate::linalg::CMatrix) -> Value {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect::<Vec<_>>())
        .collect()
}

pub fn cmd_alphabet(args: &AlphabetArgs) -> Result<Value> {
    let (spec, alphabet, digest) = spec::load_alphabet(&args.input)?;
    let tolerances = Tolerances::default();
    let basis: Vec<Value> = alphabet
        .basis()
        .iter()
        .map(|v| v.iter().map(|z| json!([z.re, z.im])).collect())
        .collect();
    let mut body = json!({
        "labels": alphabet.labels(),
        "ambient_dim": alphabet.ambient_dim(),
        "K": alphabet.rank(),
        "gram": complex_matrix(&alphabet.gram_matrix()),
        "basis": basis,
    });
    if let Some(priors) = &spec.priors {
        let rho = alphabet.letter_matrix(priors)?;
        let spectrum: Vec<f64> = rho.spectral().iter().map(|(q, _)| *q).collect();
        body["letter_matrix"] = complex_matrix(rho.matrix());
        body["letter_spectrum"] = json!(spectrum);
    }
    Ok(merge(header("alphabet", &[digest], &tolerances), body))
}

pub fn cmd_stats(args: &StatsArgs) -> Result<Value> {
    let source = spec::load_ensemble(&args.input, args.max_length)?;
    let tolerances = Tolerances::default();
    let sigma = source.message_matrix()?;
    let decomposition = sigma.block_diagonalize();
    let spectrum: Vec<f64> = sigma.spectral_decomposition().iter().map(|(q, _)| *q).collect();
    let source_rank = match &source.kind {
        SourceKind::Entries(e) => e.source_rank(),
        // every string has positive weight, so the source span is the support of σ
        SourceKind::GrandCanonical { .. } => spectrum.len(),
    };
    let body = json!({
        "K": source.shape.k(),
        "N": source.shape.max_len(),
        "D": source.shape.dim(),
        "entries": entry_count(&source),
        "mean_length": expected_length(&sigma.clone().into())?,
        "length_distribution": decomposition.lambdas,
        "spectrum": spectrum,
        "source_rank": source_rank,
        "block_residual": decomposition.residual,
        "block_diagonal": sigma.is_block_diagonal(),
    });
    Ok(merge(header("stats", &source.inputs, &tolerances), body))
}

fn entry_count(source: &MessageSource) -> Value {
    match &source.kind {
        SourceKind::Entries(e) => json!(e.len()),
        SourceKind::GrandCanonical { .. } => Value::Null,
    }
}

/// Returns the report and whether the ensembles are equivalent.
pub fn cmd_equiv(args: &EquivArgs) -> Result<(Value, bool)> {
    if !(args.tol > 0.0) {
        return Err(Error::invalid(format!("tolerance {} must be positive", args.tol)));
    }
    let a = spec::load_ensemble(&args.input, args.max_length)?;
    let b = spec::load_ensemble(&args.input2, args.max_length)?;
    if a.shape != b.shape {
        return Err(Error::ShapeMismatch(format!(
            "K={}, N={} vs K={}, N={}",
            a.shape.k(),
            a.shape.max_len(),
            b.shape.k(),
            b.shape.max_len()
        )));
    }
    let distance = a.message_matrix()?.distance(&b.message_matrix()?)?;
    let equivalent = distance <= args.tol;
    let inputs: Vec<InputDigest> = a.inputs.iter().chain(&b.inputs).cloned().collect();
    let body = json!({
        "equivalent": equivalent,
        "distance": distance,
        "tol": args.tol,
    });
    Ok((merge(header("equiv", &inputs, &Tolerances::default()), body), equivalent))
}

#[derive(Serialize)]
struct BinReport {
    label: String,
    count: u64,
    freq: f64,
    probability: f64,
}

pub fn histogram_report(h: &Histogram) -> Value {
    let outcomes: Vec<BinReport> = h
        .bins
        .iter()
        .map(|b| BinReport { label: b.value.label(), count: b.count, freq: b.freq, probability: b.probability })
        .collect();
    json!({
        "kind": match h.kind { MeasurementKind::Length => "length", MeasurementKind::Basis => "basis" },
        "outcomes": outcomes,
        "mean_length": h.mean_length,
        "variance_length": h.variance_length,
        "seed": h.seed,
        "trials": h.trials,
    })
}

pub fn cmd_measure(args: &MeasureArgs) -> Result<Value> {
    let source = spec::load_ensemble(&args.input, args.max_length)?;
    let message = source.message()?;
    let kind = match args.kind {
        KindArg::Length => MeasurementKind::Length,
        KindArg::Basis => MeasurementKind::Basis,
    };
    let h = sample_statistics(&message, kind, args.trials, args.seed)?;
    let body = merge(
        histogram_report(&h),
        json!({ "expected_length": expected_length(&message)? }),
    );
    Ok(merge(header("measure", &source.inputs, &Tolerances::default()), body))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let (report, exit_code, output) = match &cli.command {
        Command::Alphabet(a) => (cmd_alphabet(a)?, 0, a.out.output.clone()),
        Command::Stats(a) => (cmd_stats(a)?, 0, a.out.output.clone()),
        Command::Equiv(a) => {
            let (report, eq) = cmd_equiv(a)?;
            (report, if eq { 0 } else { 1 }, a.out.output.clone())
        }
        Command::Measure(a) => (cmd_measure(a)?, 0, a.out.output.clone()),
    };
    Ok(Outcome { report, exit_code, output })
}

/// Writes floats with 17 significant digits.
struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes a report; the output always ends in a newline.
pub fn render(report: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    report.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Runs the CLI and returns the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(outcome) => {
            let text = render(&outcome.report);
            match &outcome.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
                None => print!("{text}"),
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
