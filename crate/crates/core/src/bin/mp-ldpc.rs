use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mp_ldpc::channel::{sigma_from_ebn0, NoiseSpec};
use mp_ldpc::gf2::rank;
use mp_ldpc::mpsat::{FlipMode, MpHyperParams};
use mp_ldpc::sim::{self, Code, CsvRow, SimConfig, SimRecord, StopRule, SweepGrid, TransmitMode};
use mp_ldpc::{Decoder, Error, ParityCheckMatrix};

#[derive(Parser)]
#[command(
    name = "mp-ldpc",
    version,
    about = "MP-XOR-SAT LDPC decoding and BER/FER simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode one frame of channel output
    Decode(DecodeArgs),
    /// Monte-Carlo BER/FER curves
    Simulate(SimulateArgs),
    /// MP-XOR-SAT hyper-parameter grid
    Sweep(SweepArgs),
    /// Paired runs with and without the normalization term
    Ablate(AblateArgs),
    /// List builtin codes or summarize a parity-check matrix
    Codes(CodesArgs),
}

#[derive(Args, Clone)]
struct DecoderFlags {
    /// MP margin (default: number of checks)
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// Flip threshold (MP-XOR-SAT and GDBF)
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// MP-XOR-SAT learning rate
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    /// Iteration cap shared by every decoder in the run
    #[arg(long)]
    i_max: Option<usize>,
    /// multi or single
    #[arg(long)]
    flip_mode: Option<FlipMode>,
    /// Reset q to zero for flipped bits
    #[arg(long)]
    reset_q: bool,
    /// Drop the channel correlation term
    #[arg(long)]
    no_normalize: bool,
    /// Do not project q onto q <= 0
    #[arg(long)]
    no_clamp: bool,
    /// Feed 2r/sigma^2 instead of r to MP-XOR-SAT
    #[arg(long)]
    llr_input: bool,
}

impl DecoderFlags {
    fn build(&self, id: &str) -> Result<Decoder, Error> {
        let mut d = Decoder::from_id(id)?;
        match &mut d {
            Decoder::MpXorSat(p) => {
                p.tau = self.tau.or(p.tau);
                p.theta = self.theta.unwrap_or(p.theta);
                p.eta = self.eta.unwrap_or(p.eta);
                p.flip_mode = self.flip_mode.unwrap_or(p.flip_mode);
                p.reset_q_on_flip |= self.reset_q;
                p.normalize &= !self.no_normalize;
                p.clamp_q &= !self.no_clamp;
                p.llr_input |= self.llr_input;
            }
            Decoder::Gdbf(p) => {
                p.theta = self.theta.unwrap_or(p.theta);
                p.flip_mode = self.flip_mode.unwrap_or(p.flip_mode);
            }
            Decoder::Spa(_) => {}
        }
        if let Some(i) = self.i_max {
            d.set_i_max(i);
        }
        Ok(d)
    }

    fn mp(&self) -> Result<MpHyperParams, Error> {
        match self.build("mpxorsat")? {
            Decoder::MpXorSat(p) => Ok(p),
            _ => unreachable!(),
        }
    }
}

#[derive(Args)]
struct DecodeArgs {
    /// Builtin code name or alist path
    #[arg(long)]
    code: String,
    /// File of N whitespace-separated reals; stdin when omitted or '-'
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "mpxorsat")]
    decoder: String,
    /// Channel noise standard deviation
    #[arg(long, conflicts_with = "snr")]
    sigma: Option<f64>,
    /// Eb/N0 in dB, converted to sigma with the code rate
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<f64>,
    /// Print the satisfied-clause count per iteration (MP-XOR-SAT)
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    params: DecoderFlags,
}

#[derive(Args)]
struct RunFlags {
    /// Builtin code name or alist path
    #[arg(long)]
    code: String,
    /// Comma-separated Eb/N0 values in dB
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    snr: Vec<f64>,
    /// Frame errors per point before stopping
    #[arg(long, default_value_t = 100)]
    stop_errors: u64,
    /// Frame cap per point
    #[arg(long, default_value_t = 10_000_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; results do not depend on this
    #[arg(long, env = "MP_LDPC_THREADS", default_value_t = 1)]
    workers: usize,
    /// CSV destination; CSV goes to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// all_zero or random_codeword
    #[arg(long)]
    transmit: Option<TransmitMode>,
}

impl RunFlags {
    fn config(&self, decoder: Decoder, default_transmit: TransmitMode) -> SimConfig {
        SimConfig {
            decoder,
            snrs: self.snr.clone(),
            stop: StopRule {
                frame_errors: self.stop_errors,
                max_frames: self.max_frames,
            },
            seed: self.seed,
            transmit: self.transmit.unwrap_or(default_transmit),
            workers: self.workers.max(1),
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunFlags,
    /// Comma-separated decoder list
    #[arg(long, value_delimiter = ',', default_value = "mpxorsat")]
    decoder: Vec<String>,
    #[command(flatten)]
    params: DecoderFlags,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunFlags,
    /// Axis as name=v1,v2,... for tau, theta or eta; repeatable
    #[arg(long, allow_hyphen_values = true)]
    grid: Vec<String>,
    #[command(flatten)]
    params: DecoderFlags,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    run: RunFlags,
    #[command(flatten)]
    params: DecoderFlags,
}

#[derive(Args)]
struct CodesArgs {
    /// Summarize an alist file
    #[arg(long, conflicts_with = "code")]
    alist: Option<PathBuf>,
    /// Summarize a builtin code or alist path
    #[arg(long)]
    code: Option<String>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Dimension { .. } => Failure::Usage(e.to_string()),
            Error::Parse { .. } | Error::Io(_) => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Decode(a) => cmd_decode(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::Codes(a) => cmd_codes(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            File::open(p)
                .and_then(|mut f| f.read_to_string(&mut text))
                .map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?;
        }
        _ => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    Ok(text)
}

fn cmd_decode(a: DecodeArgs) -> CmdResult {
    let code = Code::load(&a.code)?;
    let decoder = a.params.build(&a.decoder)?;
    let text = read_input(a.input.as_ref())?;
    let r = text
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Failure::Usage(format!("not a number: '{t}'")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let n = code.matrix.n();
    if r.len() != n {
        return Err(Failure::Usage(format!(
            "expected {n} channel values, got {}",
            r.len()
        )));
    }
    let sigma = match (a.sigma, a.snr) {
        (Some(s), _) => s,
        (None, Some(db)) => sigma_from_ebn0(NoiseSpec {
            eb_n0_db: db,
            rate: code.rate(),
        })?,
        (None, None) => 1.0,
    };
    let out = match (&decoder, a.trace) {
        (Decoder::MpXorSat(p), true) => mp_ldpc::mpsat::decode_traced(&r, &code.matrix, p)?,
        _ => decoder.decode(&r, &code.matrix, sigma)?,
    };
    println!(
        "u={} converged={} iters={}",
        out.decision,
        u8::from(out.converged),
        out.iterations_used
    );
    if let Some(t) = out.trajectory {
        let t: Vec<String> = t.iter().map(usize::to_string).collect();
        println!("satisfied={}", t.join(","));
    }
    Ok(())
}

fn emit_csv(out: Option<&PathBuf>, rows: &[CsvRow]) -> CmdResult {
    match out {
        Some(p) => {
            let f =
                File::create(p).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            sim::write_csv(&mut w, rows)?;
            w.flush()?;
        }
        None => sim::write_csv(io::stdout().lock(), rows)?,
    }
    Ok(())
}

fn summary(rows: &[CsvRow]) {
    println!(
        "{:<18} {:>7} {:>10} {:>12} {:>12} {:>7}",
        "decoder", "snr_db", "frames", "ber", "fer", "iters"
    );
    for row in rows {
        let r = &row.record;
        println!(
            "{:<18} {:>7} {:>10} {:>12.4e} {:>12.4e} {:>7.2}",
            row.decoder, r.snr_db, r.frames, r.ber, r.fer, r.mean_iterations
        );
    }
}

/// CSV to `--out` plus a table on stdout, or CSV alone on stdout.
fn finish(run: &RunFlags, rows: &[CsvRow]) -> CmdResult {
    emit_csv(run.out.as_ref(), rows)?;
    if run.out.is_some() {
        summary(rows);
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> CmdResult {
    let code = Code::load(&a.run.code)?;
    let mut rows = Vec::new();
    for id in &a.decoder {
        let decoder = a.params.build(id)?;
        let cfg = a.run.config(decoder.clone(), TransmitMode::AllZero);
        for rec in sim::run(&code, &cfg)? {
            rows.push(CsvRow::new(decoder.id(), &code, &decoder, cfg.seed, rec));
        }
    }
    finish(&a.run, &rows)
}

fn parse_grid(specs: &[String]) -> Result<SweepGrid, Failure> {
    let mut grid = SweepGrid::default();
    for spec in specs {
        let (key, values) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("grid axis '{spec}' is not name=values")))?;
        let values = values
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|_| Failure::Usage(format!("bad grid values in '{spec}'")))?;
        let axis = match key {
            "tau" => &mut grid.tau,
            "theta" => &mut grid.theta,
            "eta" => &mut grid.eta,
            other => return Err(Failure::Usage(format!("unknown grid axis '{other}'"))),
        };
        axis.extend(values);
    }
    Ok(grid)
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let code = Code::load(&a.run.code)?;
    let grid = parse_grid(&a.grid)?;
    let decoder = Decoder::MpXorSat(a.params.mp()?);
    let cfg = a.run.config(decoder, TransmitMode::AllZero);
    let rows: Vec<CsvRow> = sim::sweep(&code, &cfg, &grid)?
        .into_iter()
        .map(|row| {
            let d = Decoder::MpXorSat(row.params);
            CsvRow::new(d.id(), &code, &d, cfg.seed, row.record)
        })
        .collect();
    finish(&a.run, &rows)
}

fn percent(count: u64, rec: &SimRecord) -> f64 {
    100.0 * count as f64 / rec.frames as f64
}

fn cmd_ablate(a: AblateArgs) -> CmdResult {
    let code = Code::load(&a.run.code)?;
    let base = a.params.mp()?;
    let cfg = a.run.config(
        Decoder::MpXorSat(base.clone()),
        TransmitMode::RandomCodeword,
    );
    let paired = sim::ablation_normalization(&code, &cfg)?;
    let with = Decoder::MpXorSat(MpHyperParams {
        normalize: true,
        ..base.clone()
    });
    let without = Decoder::MpXorSat(MpHyperParams {
        normalize: false,
        ..base
    });
    let mut rows = Vec::new();
    for p in &paired {
        rows.push(CsvRow::new(
            "mpxorsat",
            &code,
            &with,
            cfg.seed,
            p.with_normalization.clone(),
        ));
        rows.push(CsvRow::new(
            "mpxorsat_nonorm",
            &code,
            &without,
            cfg.seed,
            p.without_normalization.clone(),
        ));
    }
    emit_csv(a.run.out.as_ref(), &rows)?;
    if a.run.out.is_some() {
        println!(
            "{:<18} {:>7} {:>10} {:>9} {:>15} {:>9}",
            "decoder", "snr_db", "frames", "match%", "valid_mismatch%", "invalid%"
        );
        for row in &rows {
            let r = &row.record;
            println!(
                "{:<18} {:>7} {:>10} {:>9.2} {:>15.2} {:>9.2}",
                row.decoder,
                r.snr_db,
                r.frames,
                percent(r.match_count, r),
                percent(r.valid_mismatch_count, r),
                percent(r.invalid_count, r)
            );
        }
    }
    Ok(())
}

fn describe(h: &ParityCheckMatrix) -> String {
    let span = |it: &mut dyn Iterator<Item = usize>| {
        let v: Vec<usize> = it.collect();
        let (lo, hi) = (
            v.iter().min().copied().unwrap_or(0),
            v.iter().max().copied().unwrap_or(0),
        );
        if lo == hi {
            lo.to_string()
        } else {
            format!("{lo}..{hi}")
        }
    };
    format!(
        "N={} M={} rank={} rowdeg={} coldeg={}",
        h.n(),
        h.m(),
        rank(h),
        span(&mut h.row_degrees()),
        span(&mut h.col_degrees())
    )
}

fn cmd_codes(a: CodesArgs) -> CmdResult {
    if let Some(path) = a.alist {
        let h = mp_ldpc::alist::read_alist(&path)?;
        println!("{}", describe(&h));
    } else if let Some(spec) = a.code {
        println!("{}", describe(&Code::load(&spec)?.matrix));
    } else {
        for name in ParityCheckMatrix::BUILTIN_NAMES {
            let h = ParityCheckMatrix::builtin(name).expect("builtin exists");
            println!("{name}: {}", describe(&h));
        }
    }
    Ok(())
}
