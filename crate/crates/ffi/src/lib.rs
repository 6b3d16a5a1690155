//! C ABI over `mp_ldpc`.
//!
//! Every fallible function returns an [`MplStatus`]; on failure the message
//! is available from [`mpl_last_error_message`] on the same thread. Codes
//! are opaque [`MplCode`] handles released with [`mpl_code_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use mp_ldpc::alist::{parse_alist, read_alist, serialize_alist};
use mp_ldpc::gdbf::GdbfParams;
use mp_ldpc::margin;
use mp_ldpc::mpsat::{FlipMode, MpHyperParams};
use mp_ldpc::sim::{self, Code, SimConfig, StopRule, TransmitMode};
use mp_ldpc::spa::SpaParams;
use mp_ldpc::{DecodeOutcome, Decoder, Error, ParityCheckMatrix};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MplStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    ParseError = 4,
    IoError = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MplFlipMode {
    Multi = 0,
    Single = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MplDecoderKind {
    MpXorSat = 0,
    Spa = 1,
    Gdbf = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MplTransmit {
    AllZero = 0,
    RandomCodeword = 1,
}

/// Opaque parity-check code with its generator basis.
pub struct MplCode(Code);

/// MP-XOR-SAT settings. `tau <= 0` selects the number of checks.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MplMpParams {
    pub tau: f64,
    pub theta: f64,
    pub eta: f64,
    pub i_max: u32,
    pub q_min: f64,
    pub flip_mode: MplFlipMode,
    pub clamp_q: bool,
    pub reset_q_on_flip: bool,
    pub normalize: bool,
    pub llr_input: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MplSpaParams {
    pub i_max: u32,
    pub llr_clip: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MplGdbfParams {
    pub i_max: u32,
    pub theta: f64,
    pub flip_mode: MplFlipMode,
}

/// Decoder selection for simulations; only the member named by `kind` is read.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MplDecoderConfig {
    pub kind: MplDecoderKind,
    pub mp: MplMpParams,
    pub spa: MplSpaParams,
    pub gdbf: MplGdbfParams,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MplDecodeInfo {
    pub iterations: u32,
    pub converged: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MplSimOptions {
    pub snr_db: f64,
    pub frame_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    pub transmit: MplTransmit,
    pub workers: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MplSimRecord {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub mean_iterations: f64,
    pub match_count: u64,
    pub valid_mismatch_count: u64,
    pub invalid_count: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type FfiResult = Result<(), Failure>;

fn guard(f: impl FnOnce() -> FfiResult) -> MplStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MplStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            MplStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            let status = match e {
                Error::Dimension { .. } => MplStatus::DimensionMismatch,
                Error::Parse { .. } => MplStatus::ParseError,
                Error::InvalidArgument(_) => MplStatus::InvalidArgument,
                Error::Io(_) => MplStatus::IoError,
            };
            set_error(e.to_string());
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MplStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Lib(Error::InvalidArgument(format!("{what} is not valid UTF-8"))))
}

unsafe fn slice_arg<'a, T>(
    p: *const T,
    len: usize,
    what: &'static str,
) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a, T>(
    p: *mut T,
    len: usize,
    what: &'static str,
) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn check_len(expected: usize, found: usize) -> FfiResult {
    if expected == found {
        Ok(())
    } else {
        Err(Failure::Lib(Error::Dimension { expected, found }))
    }
}

unsafe fn publish(code: Code, dst: *mut *mut MplCode) -> FfiResult {
    let dst = out(dst, "out")?;
    *dst = Box::into_raw(Box::new(MplCode(code)));
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn mpl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builtin code by name: "majority", "hamming74" or "reg32".
///
/// # Safety
/// `name` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mpl_code_builtin(
    name: *const c_char,
    out: *mut *mut MplCode,
) -> MplStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let h = ParityCheckMatrix::builtin(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown builtin code '{name}'")))?;
        publish(Code::new(name, h), out)
    })
}

/// Parses alist text.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mpl_code_parse_alist(
    text: *const c_char,
    out: *mut *mut MplCode,
) -> MplStatus {
    guard(|| {
        let h = parse_alist(str_arg(text, "text")?)?;
        publish(Code::new("alist", h), out)
    })
}

/// Reads an alist file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mpl_code_read_alist(
    path: *const c_char,
    out: *mut *mut MplCode,
) -> MplStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let h = read_alist(path)?;
        publish(Code::new(path, h), out)
    })
}

/// Random column-regular code; identical seeds give identical matrices.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mpl_code_random_regular(
    m: usize,
    n: usize,
    col_degree: usize,
    seed: u64,
    out: *mut *mut MplCode,
) -> MplStatus {
    guard(|| {
        let h = ParityCheckMatrix::random_regular(m, n, col_degree, seed)?;
        publish(Code::new(format!("regular-{m}x{n}"), h), out)
    })
}

/// # Safety
/// `code` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mpl_code_free(code: *mut MplCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Block length N, check count M and dimension k = N - rank.
///
/// # Safety
/// `code` must be a live handle; output pointers may be NULL.
#[no_mangle]
pub unsafe extern "C" fn mpl_code_dims(
    code: *const MplCode,
    n: *mut usize,
    m: *mut usize,
    k: *mut usize,
) -> MplStatus {
    guard(|| {
        let c = &deref(code, "code")?.0;
        for (p, v) in [(n, c.matrix.n()), (m, c.matrix.m()), (k, c.generator.k())] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Serializes to alist text; release with `mpl_string_free`.
///
/// # Safety
/// `code` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mpl_code_to_alist(
    code: *const MplCode,
    out: *mut *mut c_char,
) -> MplStatus {
    guard(|| {
        let text = serialize_alist(&deref(code, "code")?.0.matrix);
        let dst = self::out(out, "out")?;
        *dst = CString::new(text)
            .expect("alist text has no nul")
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mpl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Syndrome of a 0/1 word of length N into `syndrome` of length M.
///
/// # Safety
/// `bits` must hold `n` bytes and `syndrome` `m` bytes.
#[no_mangle]
pub unsafe extern "C" fn mpl_code_syndrome(
    code: *const MplCode,
    bits: *const u8,
    n: usize,
    syndrome: *mut u8,
    m: usize,
) -> MplStatus {
    guard(|| {
        let h = &deref(code, "code")?.0.matrix;
        let word = slice_arg(bits, n, "bits")?;
        check_len(h.m(), m)?;
        let s = h.syndrome(&word.to_vec().into())?;
        slice_out(syndrome, m, "syndrome")?.copy_from_slice(s.bits());
        Ok(())
    })
}

fn flip_mode(m: MplFlipMode) -> FlipMode {
    match m {
        MplFlipMode::Multi => FlipMode::Multi,
        MplFlipMode::Single => FlipMode::Single,
    }
}

fn c_flip_mode(m: FlipMode) -> MplFlipMode {
    match m {
        FlipMode::Multi => MplFlipMode::Multi,
        FlipMode::Single => MplFlipMode::Single,
    }
}

impl From<&MplMpParams> for MpHyperParams {
    fn from(p: &MplMpParams) -> Self {
        MpHyperParams {
            tau: (p.tau > 0.0).then_some(p.tau),
            theta: p.theta,
            eta: p.eta,
            i_max: p.i_max as usize,
            q_min: p.q_min,
            flip_mode: flip_mode(p.flip_mode),
            clamp_q: p.clamp_q,
            reset_q_on_flip: p.reset_q_on_flip,
            normalize: p.normalize,
            llr_input: p.llr_input,
        }
    }
}

#[no_mangle]
pub extern "C" fn mpl_mp_params_default() -> MplMpParams {
    let p = MpHyperParams::default();
    MplMpParams {
        tau: 0.0,
        theta: p.theta,
        eta: p.eta,
        i_max: p.i_max as u32,
        q_min: p.q_min,
        flip_mode: c_flip_mode(p.flip_mode),
        clamp_q: p.clamp_q,
        reset_q_on_flip: p.reset_q_on_flip,
        normalize: p.normalize,
        llr_input: p.llr_input,
    }
}

#[no_mangle]
pub extern "C" fn mpl_spa_params_default() -> MplSpaParams {
    let p = SpaParams::default();
    MplSpaParams {
        i_max: p.i_max as u32,
        llr_clip: p.llr_clip,
    }
}

#[no_mangle]
pub extern "C" fn mpl_gdbf_params_default() -> MplGdbfParams {
    let p = GdbfParams::default();
    MplGdbfParams {
        i_max: p.i_max as u32,
        theta: p.theta,
        flip_mode: c_flip_mode(p.flip_mode),
    }
}

/// Defaults for every decoder with `kind` selected.
#[no_mangle]
pub extern "C" fn mpl_decoder_config_default(kind: MplDecoderKind) -> MplDecoderConfig {
    MplDecoderConfig {
        kind,
        mp: mpl_mp_params_default(),
        spa: mpl_spa_params_default(),
        gdbf: mpl_gdbf_params_default(),
    }
}

fn decoder_from(c: &MplDecoderConfig) -> Decoder {
    match c.kind {
        MplDecoderKind::MpXorSat => Decoder::MpXorSat((&c.mp).into()),
        MplDecoderKind::Spa => Decoder::Spa(SpaParams {
            i_max: c.spa.i_max as usize,
            llr_clip: c.spa.llr_clip,
        }),
        MplDecoderKind::Gdbf => Decoder::Gdbf(GdbfParams {
            i_max: c.gdbf.i_max as usize,
            theta: c.gdbf.theta,
            flip_mode: flip_mode(c.gdbf.flip_mode),
        }),
    }
}

unsafe fn run_decoder(
    code: *const MplCode,
    decoder: Decoder,
    r: *const f64,
    n: usize,
    sigma: f64,
    bits: *mut u8,
    info: *mut MplDecodeInfo,
) -> FfiResult {
    let h = &deref(code, "code")?.0.matrix;
    let r = slice_arg(r, n, "r")?;
    check_len(h.n(), n)?;
    let DecodeOutcome {
        decision,
        iterations_used,
        converged,
        ..
    } = decoder.decode(r, h, sigma)?;
    slice_out(bits, n, "bits")?.copy_from_slice(decision.bits());
    if let Some(info) = info.as_mut() {
        *info = MplDecodeInfo {
            iterations: iterations_used as u32,
            converged,
        };
    }
    Ok(())
}

/// Decodes channel output `r` (length N) into 0/1 `bits` (length N).
/// `sigma` is only read when `params->llr_input` is set. `info` may be NULL.
///
/// # Safety
/// `r` and `bits` must hold `n` elements; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mpl_decode_mpxorsat(
    code: *const MplCode,
    params: *const MplMpParams,
    r: *const f64,
    n: usize,
    sigma: f64,
    bits: *mut u8,
    info: *mut MplDecodeInfo,
) -> MplStatus {
    guard(|| {
        let p = deref(params, "params")?;
        run_decoder(code, Decoder::MpXorSat(p.into()), r, n, sigma, bits, info)
    })
}

/// Sum-product decoding with channel LLRs `2 r / sigma^2`.
///
/// # Safety
/// As for `mpl_decode_mpxorsat`.
#[no_mangle]
pub unsafe extern "C" fn mpl_decode_spa(
    code: *const MplCode,
    params: *const MplSpaParams,
    r: *const f64,
    n: usize,
    sigma: f64,
    bits: *mut u8,
    info: *mut MplDecodeInfo,
) -> MplStatus {
    guard(|| {
        let mut c = mpl_decoder_config_default(MplDecoderKind::Spa);
        c.spa = *deref(params, "params")?;
        run_decoder(code, decoder_from(&c), r, n, sigma, bits, info)
    })
}

/// Gradient-descent bit flipping.
///
/// # Safety
/// As for `mpl_decode_mpxorsat`.
#[no_mangle]
pub unsafe extern "C" fn mpl_decode_gdbf(
    code: *const MplCode,
    params: *const MplGdbfParams,
    r: *const f64,
    n: usize,
    bits: *mut u8,
    info: *mut MplDecodeInfo,
) -> MplStatus {
    guard(|| {
        let mut c = mpl_decoder_config_default(MplDecoderKind::Gdbf);
        c.gdbf = *deref(params, "params")?;
        run_decoder(code, decoder_from(&c), r, n, 1.0, bits, info)
    })
}

/// Margin-propagation offset of `y` with margin `tau`, and optionally the
/// probability scores (`scores` may be NULL, otherwise `len` entries).
///
/// # Safety
/// `y` must hold `len` values and `zeta` be writable.
#[no_mangle]
pub unsafe extern "C" fn mpl_margin_propagation(
    y: *const f64,
    len: usize,
    tau: f64,
    zeta: *mut f64,
    scores: *mut f64,
) -> MplStatus {
    guard(|| {
        let r = margin::mp(slice_arg(y, len, "y")?, tau)?;
        *out(zeta, "zeta")? = r.zeta;
        if !scores.is_null() {
            slice_out(scores, len, "scores")?.copy_from_slice(&r.scores);
        }
        Ok(())
    })
}

/// Runs one Monte-Carlo point. Results depend only on the code, decoder,
/// SNR, stop rule, seed and transmit mode.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mpl_simulate_point(
    code: *const MplCode,
    decoder: *const MplDecoderConfig,
    options: *const MplSimOptions,
    record: *mut MplSimRecord,
) -> MplStatus {
    guard(|| {
        let code = &deref(code, "code")?.0;
        let decoder = decoder_from(deref(decoder, "decoder")?);
        let o = deref(options, "options")?;
        let cfg = SimConfig {
            decoder,
            snrs: vec![o.snr_db],
            stop: StopRule {
                frame_errors: o.frame_errors,
                max_frames: o.max_frames,
            },
            seed: o.seed,
            transmit: match o.transmit {
                MplTransmit::AllZero => TransmitMode::AllZero,
                MplTransmit::RandomCodeword => TransmitMode::RandomCodeword,
            },
            workers: o.workers.max(1) as usize,
        };
        let r = sim::run_point(code, &cfg, o.snr_db)?;
        *out(record, "record")? = MplSimRecord {
            snr_db: r.snr_db,
            frames: r.frames,
            bit_errors: r.bit_errors,
            frame_errors: r.frame_errors,
            ber: r.ber,
            fer: r.fer,
            mean_iterations: r.mean_iterations,
            match_count: r.match_count,
            valid_mismatch_count: r.valid_mismatch_count,
            invalid_count: r.invalid_count,
        };
        Ok(())
    })
}
