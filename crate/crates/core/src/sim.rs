//! Monte-Carlo BER/FER harness.
//!
//! Frame `k` of a run draws its codeword and noise from its own ChaCha
//! stream keyed by `(seed, k)`. Frames are decoded in fixed-size batches
//! (in parallel when more than one worker is configured) and folded in
//! frame order, so every aggregate is identical to a sequential run.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::alist::read_alist;
use crate::channel::{frame_rng, sigma_from_ebn0, transmit, NoiseSpec};
use crate::decoder::Decoder;
use crate::error::{Error, Result};
use crate::gf2::{gaussian_generator, Generator};
use crate::matrix::{BinaryWord, ParityCheckMatrix};
use crate::mpsat::MpHyperParams;

const BATCH: u64 = 2048;

/// A parity-check matrix with its name and generator basis.
#[derive(Clone, Debug)]
pub struct Code {
    pub name: String,
    pub matrix: ParityCheckMatrix,
    pub generator: Generator,
}

impl Code {
    pub fn new(name: impl Into<String>, matrix: ParityCheckMatrix) -> Self {
        let generator = gaussian_generator(&matrix);
        Code {
            name: name.into(),
            matrix,
            generator,
        }
    }

    /// Resolves a builtin name, or otherwise reads `spec` as an alist path.
    pub fn load(spec: &str) -> Result<Self> {
        if let Some(h) = ParityCheckMatrix::builtin(spec) {
            return Ok(Code::new(spec, h));
        }
        let path = Path::new(spec);
        if !path.exists() {
            return Err(Error::invalid(format!(
                "'{spec}' is neither a builtin code ({}) nor an existing alist file",
                ParityCheckMatrix::BUILTIN_NAMES.join(", ")
            )));
        }
        let name = path
            .file_stem()
            .map_or_else(|| spec.to_string(), |s| s.to_string_lossy().into_owned());
        Ok(Code::new(name, read_alist(path)?))
    }

    /// Code rate k/N with k = N - rank(H).
    pub fn rate(&self) -> f64 {
        self.generator.rate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TransmitMode {
    #[default]
    AllZero,
    RandomCodeword,
}

impl std::str::FromStr for TransmitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_zero" | "zero" => Ok(TransmitMode::AllZero),
            "random_codeword" | "random" => Ok(TransmitMode::RandomCodeword),
            other => Err(Error::invalid(format!("unknown transmit mode '{other}'"))),
        }
    }
}

/// Stop after `frame_errors` erroneous frames or `max_frames` frames.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopRule {
    pub frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            frame_errors: 100,
            max_frames: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub decoder: Decoder,
    pub snrs: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    pub transmit: TransmitMode,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(decoder: Decoder, snrs: Vec<f64>) -> Self {
        SimConfig {
            decoder,
            snrs,
            stop: StopRule::default(),
            seed: 1,
            transmit: TransmitMode::AllZero,
            workers: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.snrs.is_empty() {
            return Err(Error::invalid("SNR list is empty"));
        }
        if self.stop.frame_errors == 0 || self.stop.max_frames == 0 {
            return Err(Error::invalid("stop rule counts must be at least 1"));
        }
        Ok(())
    }
}

/// Aggregates for one SNR point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimRecord {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub mean_iterations: f64,
    /// Decision equals the transmitted codeword.
    pub match_count: u64,
    /// Decision is a codeword other than the transmitted one.
    pub valid_mismatch_count: u64,
    /// Decision is not a codeword.
    pub invalid_count: u64,
    pub total_iterations: u64,
    /// Frames where the decoder reached an all-satisfied state.
    pub converged_frames: u64,
    /// Iterations summed over converged frames only.
    pub converged_iterations: u64,
}

impl SimRecord {
    pub fn match_fraction(&self) -> f64 {
        self.match_count as f64 / self.frames as f64
    }

    pub fn valid_mismatch_fraction(&self) -> f64 {
        self.valid_mismatch_count as f64 / self.frames as f64
    }

    pub fn invalid_fraction(&self) -> f64 {
        self.invalid_count as f64 / self.frames as f64
    }

    /// Mean iterations over converged frames.
    pub fn mean_converged_iterations(&self) -> f64 {
        self.converged_iterations as f64 / self.converged_frames as f64
    }

    fn add(&mut self, f: &FrameResult) {
        self.frames += 1;
        self.bit_errors += f.bit_errors;
        self.total_iterations += f.iterations;
        match f.outcome {
            Outcome::Match => self.match_count += 1,
            Outcome::ValidMismatch => self.valid_mismatch_count += 1,
            Outcome::Invalid => self.invalid_count += 1,
        }
        if f.outcome != Outcome::Match {
            self.frame_errors += 1;
        }
        if f.converged {
            self.converged_frames += 1;
            self.converged_iterations += f.iterations;
        }
    }

    fn finish(&mut self, n: usize) {
        let frames = self.frames as f64;
        self.ber = self.bit_errors as f64 / (frames * n as f64);
        self.fer = self.frame_errors as f64 / frames;
        self.mean_iterations = self.total_iterations as f64 / frames;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Match,
    ValidMismatch,
    Invalid,
}

struct FrameResult {
    bit_errors: u64,
    iterations: u64,
    converged: bool,
    outcome: Outcome,
}

fn codeword_for<R: Rng>(code: &Code, mode: TransmitMode, rng: &mut R) -> BinaryWord {
    match mode {
        TransmitMode::AllZero => BinaryWord::zeros(code.matrix.n()),
        TransmitMode::RandomCodeword => {
            let msg: Vec<u8> = (0..code.generator.k())
                .map(|_| rng.random_range(0..2))
                .collect();
            code.generator.encode(&msg)
        }
    }
}

/// Received vector and codeword for frame `frame` of a run.
pub fn frame_input(
    code: &Code,
    mode: TransmitMode,
    seed: u64,
    frame: u64,
    sigma: f64,
) -> (BinaryWord, Vec<f64>) {
    let mut rng = frame_rng(seed, frame);
    let c = codeword_for(code, mode, &mut rng);
    let f = transmit(&c, sigma, &mut rng);
    (f.codeword, f.received)
}

fn run_frame(
    code: &Code,
    decoder: &Decoder,
    mode: TransmitMode,
    seed: u64,
    frame: u64,
    sigma: f64,
) -> Result<FrameResult> {
    let h = &code.matrix;
    let (c, r) = frame_input(code, mode, seed, frame, sigma);
    let out = decoder.decode(&r, h, sigma)?;
    let valid = h.is_codeword(&out.decision)?;
    debug_assert!(
        !out.converged || valid,
        "converged decoder returned a non-codeword"
    );
    let outcome = if out.decision == c {
        Outcome::Match
    } else if valid {
        Outcome::ValidMismatch
    } else {
        Outcome::Invalid
    };
    Ok(FrameResult {
        bit_errors: out.decision.distance(&c) as u64,
        iterations: out.iterations_used as u64,
        converged: out.converged,
        outcome,
    })
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Simulates one SNR point until the stop rule fires.
pub fn run_point(code: &Code, config: &SimConfig, snr_db: f64) -> Result<SimRecord> {
    config.validate()?;
    let sigma = sigma_from_ebn0(NoiseSpec {
        eb_n0_db: snr_db,
        rate: code.rate(),
    })?;
    let decoder = &config.decoder;
    let parallel = config.workers > 1;
    with_workers(config.workers, || {
        let mut rec = SimRecord {
            snr_db,
            ..Default::default()
        };
        let mut start = 0;
        'outer: while start < config.stop.max_frames {
            let end = (start + BATCH).min(config.stop.max_frames);
            let job = |k| run_frame(code, decoder, config.transmit, config.seed, k, sigma);
            let batch: Vec<Result<FrameResult>> = if parallel {
                (start..end).into_par_iter().map(job).collect()
            } else {
                (start..end).map(job).collect()
            };
            for f in batch {
                rec.add(&f?);
                if rec.frame_errors >= config.stop.frame_errors {
                    break 'outer;
                }
            }
            start = end;
        }
        rec.finish(code.matrix.n());
        Ok(rec)
    })?
}

/// Runs every SNR in the config.
pub fn run(code: &Code, config: &SimConfig) -> Result<Vec<SimRecord>> {
    config.validate()?;
    config
        .snrs
        .iter()
        .map(|&s| run_point(code, config, s))
        .collect()
}

/// Hyper-parameter grid; an empty axis keeps the base value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepGrid {
    pub tau: Vec<f64>,
    pub theta: Vec<f64>,
    pub eta: Vec<f64>,
}

impl SweepGrid {
    /// Cartesian product in tau-major, eta-minor order.
    pub fn combinations(&self, base: &MpHyperParams) -> Vec<MpHyperParams> {
        let axis = |v: &[f64], b: Option<f64>| -> Vec<Option<f64>> {
            if v.is_empty() {
                vec![b]
            } else {
                v.iter().map(|&x| Some(x)).collect()
            }
        };
        let mut out = Vec::new();
        for tau in axis(&self.tau, base.tau) {
            for theta in axis(&self.theta, Some(base.theta)) {
                for eta in axis(&self.eta, Some(base.eta)) {
                    out.push(MpHyperParams {
                        tau,
                        theta: theta.unwrap_or(base.theta),
                        eta: eta.unwrap_or(base.eta),
                        ..base.clone()
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub params: MpHyperParams,
    pub record: SimRecord,
}

fn mp_params(config: &SimConfig) -> Result<&MpHyperParams> {
    match &config.decoder {
        Decoder::MpXorSat(p) => Ok(p),
        other => Err(Error::invalid(format!(
            "this experiment needs the mpxorsat decoder, not {}",
            other.id()
        ))),
    }
}

/// Evaluates every grid point at every SNR of the config.
pub fn sweep(code: &Code, config: &SimConfig, grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    let base = mp_params(config)?;
    let mut rows = Vec::new();
    for params in grid.combinations(base) {
        let cfg = SimConfig {
            decoder: Decoder::MpXorSat(params.clone()),
            ..config.clone()
        };
        for &snr in &config.snrs {
            rows.push(SweepRow {
                params: params.clone(),
                record: run_point(code, &cfg, snr)?,
            });
        }
    }
    Ok(rows)
}

/// Paired records with and without the channel correlation term, on the
/// same frames.
#[derive(Clone, Debug, PartialEq)]
pub struct AblationRow {
    pub with_normalization: SimRecord,
    pub without_normalization: SimRecord,
}

pub fn ablation_normalization(code: &Code, config: &SimConfig) -> Result<Vec<AblationRow>> {
    let base = mp_params(config)?;
    let variant = |normalize| SimConfig {
        decoder: Decoder::MpXorSat(MpHyperParams {
            normalize,
            ..base.clone()
        }),
        ..config.clone()
    };
    let (on, off) = (variant(true), variant(false));
    config
        .snrs
        .iter()
        .map(|&snr| {
            Ok(AblationRow {
                with_normalization: run_point(code, &on, snr)?,
                without_normalization: run_point(code, &off, snr)?,
            })
        })
        .collect()
}

/// Satisfied-clause trajectories of the first `frames` frames at `snr_db`.
pub fn trajectories(
    code: &Code,
    params: &MpHyperParams,
    snr_db: f64,
    seed: u64,
    mode: TransmitMode,
    frames: u64,
) -> Result<Vec<Vec<usize>>> {
    let sigma = sigma_from_ebn0(NoiseSpec {
        eb_n0_db: snr_db,
        rate: code.rate(),
    })?;
    (0..frames)
        .map(|k| {
            let (_, r) = frame_input(code, mode, seed, k, sigma);
            let out = crate::mpsat::decode_traced(&r, &code.matrix, params)?;
            Ok(out.trajectory.unwrap_or_default())
        })
        .collect()
}

/// Eb/N0 at which a BER curve crosses `target`, by linear interpolation of
/// log10(BER) against dB between the bracketing points. Points with zero
/// BER are skipped. `None` if no consecutive pair brackets the target.
pub fn snr_at_ber(points: &[(f64, f64)], target: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, b)| *b > 0.0)
        .map(|&(s, b)| (s, b.log10()))
        .collect();
    let t = target.log10();
    pts.windows(2).find_map(|w| {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        if (b0 - t) * (b1 - t) <= 0.0 && b0 != b1 {
            Some(s0 + (t - b0) * (s1 - s0) / (b1 - b0))
        } else {
            None
        }
    })
}

// ---------------------------------------------------------------------------
// CSV

pub const CSV_HEADER: &str =
    "decoder,code,snr_db,frames,bit_errors,frame_errors,ber,fer,mean_iterations,match,valid_mismatch,invalid,tau,theta,eta,i_max,seed";

/// One CSV line: a record plus the settings that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub decoder: String,
    pub code: String,
    pub record: SimRecord,
    pub tau: Option<f64>,
    pub theta: Option<f64>,
    pub eta: Option<f64>,
    pub i_max: usize,
    pub seed: u64,
}

impl CsvRow {
    pub fn new(
        label: impl Into<String>,
        code: &Code,
        decoder: &Decoder,
        seed: u64,
        record: SimRecord,
    ) -> Self {
        let (tau, theta, eta) = match decoder {
            Decoder::MpXorSat(p) => (
                Some(p.tau.unwrap_or(code.matrix.m() as f64)),
                Some(p.theta),
                Some(p.eta),
            ),
            Decoder::Gdbf(p) => (None, Some(p.theta), None),
            Decoder::Spa(_) => (None, None, None),
        };
        CsvRow {
            decoder: label.into(),
            code: code.name.clone(),
            record,
            tau,
            theta,
            eta,
            i_max: decoder.i_max(),
            seed,
        }
    }

    pub fn to_line(&self) -> String {
        let r = &self.record;
        let opt = |v: Option<f64>| v.map(fmt_g6).unwrap_or_default();
        [
            self.decoder.clone(),
            self.code.clone(),
            fmt_g6(r.snr_db),
            r.frames.to_string(),
            r.bit_errors.to_string(),
            r.frame_errors.to_string(),
            fmt_g6(r.ber),
            fmt_g6(r.fer),
            fmt_g6(r.mean_iterations),
            r.match_count.to_string(),
            r.valid_mismatch_count.to_string(),
            r.invalid_count.to_string(),
            opt(self.tau),
            opt(self.theta),
            opt(self.eta),
            self.i_max.to_string(),
            self.seed.to_string(),
        ]
        .join(",")
    }
}

pub fn write_csv<W: Write>(mut w: W, rows: &[CsvRow]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.to_line())?;
    }
    Ok(())
}

/// Formats like C's `%.6g`: six significant digits, trailing zeros removed,
/// scientific notation below 1e-4 or from 1e6 up.
pub fn fmt_g6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
