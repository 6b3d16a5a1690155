//! MP-XOR-SAT bit-flipping decoder.
//!
//! Each variable carries a hard bipolar decision `d_j` and a soft
//! log-confidence `q_j <= 0`. The objective is
//!
//! ```text
//! H_log  = log(sum_{P+} exp(z_i) + eps) - log(sum_{P-} exp(z_i) + eps)
//! H_LDPC = H_log + sum_j r_j d_j q_j,        z_i = sum_{j in row i} q_j
//! ```
//!
//! where P+/P- are the satisfied/unsatisfied clauses under `d` and
//! `eps = exp(q_min)`. The decoder ascends H_LDPC in `q` with the softmax
//! weights of its gradient replaced by margin-propagation scores, and flips
//! every `d_j` whose `q_j` drops below the threshold `theta`.

use crate::error::{Error, Result};
use crate::margin::{relu, water_fill};
use crate::matrix::{BinaryWord, ParityCheckMatrix};
use crate::DecodeOutcome;

const TANH_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FlipMode {
    /// Flip every variable below threshold.
    #[default]
    Multi,
    /// Flip only the most negative variable below threshold.
    Single,
}

impl std::str::FromStr for FlipMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multi" => Ok(FlipMode::Multi),
            "single" => Ok(FlipMode::Single),
            other => Err(Error::invalid(format!("unknown flip mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for FlipMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FlipMode::Multi => "multi",
            FlipMode::Single => "single",
        })
    }
}

/// Decoder hyper-parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct MpHyperParams {
    /// MP margin; `None` uses the clause count M.
    pub tau: Option<f64>,
    /// Flip threshold on `q_j`.
    pub theta: f64,
    /// Learning rate.
    pub eta: f64,
    pub i_max: usize,
    /// Sentinel `log(eps)` for clauses outside a set.
    pub q_min: f64,
    pub flip_mode: FlipMode,
    /// Project `q` onto `q <= 0` after each update.
    pub clamp_q: bool,
    /// Set `q_j = 0` for variables flipped in the current iteration.
    pub reset_q_on_flip: bool,
    /// Include the channel correlation term `sum r_j d_j q_j`.
    pub normalize: bool,
    /// Scale the channel output to `2 r / sigma^2` before decoding.
    pub llr_input: bool,
}

impl Default for MpHyperParams {
    fn default() -> Self {
        MpHyperParams {
            tau: None,
            theta: -0.1,
            eta: 0.005,
            i_max: 100,
            q_min: -30.0,
            flip_mode: FlipMode::Multi,
            clamp_q: true,
            reset_q_on_flip: false,
            normalize: true,
            llr_input: false,
        }
    }
}

impl MpHyperParams {
    /// Checks the parameter invariants and resolves tau for `h`.
    pub fn resolve_tau(&self, h: &ParityCheckMatrix) -> Result<f64> {
        let tau = self.tau.unwrap_or(h.m() as f64);
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::invalid(format!("tau must be positive, got {tau}")));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if !self.theta.is_finite() || !self.q_min.is_finite() || self.q_min >= self.theta {
            return Err(Error::invalid("need finite q_min < theta"));
        }
        if self.i_max == 0 {
            return Err(Error::invalid("i_max must be at least 1"));
        }
        Ok(tau)
    }
}

/// Hard decisions, soft confidences and the clause partition.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderState {
    /// Bipolar decisions, each +1 or -1.
    pub d: Vec<i8>,
    /// Log-confidences.
    pub q: Vec<f64>,
    pub iteration: usize,
    /// `true` for satisfied clauses (P+).
    pub sat_mask: Vec<bool>,
}

impl DecoderState {
    pub fn unsatisfied(&self) -> usize {
        self.sat_mask.iter().filter(|&&s| !s).count()
    }

    pub fn satisfied(&self) -> usize {
        self.sat_mask.len() - self.unsatisfied()
    }

    pub fn decision(&self) -> BinaryWord {
        BinaryWord::from_bipolar(&self.d)
    }
}

/// `d_j = sign(r_j)` (zero maps to +1) and `q_j = d_j log|tanh r_j|`, with
/// `|tanh r_j|` kept inside `[1e-12, 1 - 1e-12]`.
pub fn initialize(
    r: &[f64],
    h: &ParityCheckMatrix,
    params: &MpHyperParams,
) -> Result<DecoderState> {
    Error::check_len(h.n(), r.len())?;
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("channel output must be finite"));
    }
    let d: Vec<i8> = r.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect();
    let q = r
        .iter()
        .zip(&d)
        .map(|(&v, &dj)| {
            let t = v.tanh().abs().clamp(TANH_FLOOR, 1.0 - TANH_FLOOR);
            let q = dj as f64 * t.ln();
            if params.clamp_q {
                q.min(0.0)
            } else {
                q
            }
        })
        .collect();
    let mut state = DecoderState {
        d,
        q,
        iteration: 0,
        sat_mask: vec![true; h.m()],
    };
    classify(&mut state, h);
    Ok(state)
}

/// Recomputes the partition from `d` and returns the number of unsatisfied
/// clauses. A clause is satisfied when it holds an even number of -1s.
pub fn classify(state: &mut DecoderState, h: &ParityCheckMatrix) -> usize {
    let mut unsat = 0;
    for (mask, row) in state.sat_mask.iter_mut().zip(h.rows()) {
        let negatives = row.iter().filter(|&&j| state.d[j] < 0).count();
        *mask = negatives % 2 == 0;
        unsat += !*mask as usize;
    }
    unsat
}

fn clause_sums(q: &[f64], h: &ParityCheckMatrix, out: &mut Vec<f64>) {
    out.clear();
    out.extend(
        h.rows()
            .iter()
            .map(|row| row.iter().map(|&j| q[j]).sum::<f64>()),
    );
}

/// `log(sum exp(v) + exp(q_min))`, shifted by the running maximum.
fn log_sum_exp_eps(values: impl Iterator<Item = f64> + Clone, q_min: f64) -> f64 {
    let m = values.clone().fold(q_min, f64::max);
    let s: f64 = values.map(|v| (v - m).exp()).sum::<f64>() + (q_min - m).exp();
    m + s.ln()
}

/// Log-sum-exp XOR-SAT objective under the current partition.
pub fn h_log(state: &DecoderState, h: &ParityCheckMatrix, q_min: f64) -> f64 {
    let mut z = Vec::with_capacity(h.m());
    clause_sums(&state.q, h, &mut z);
    let sat = &state.sat_mask;
    let pos = z.iter().zip(sat).filter(|(_, &s)| s).map(|(&v, _)| v);
    let neg = z.iter().zip(sat).filter(|(_, &s)| !s).map(|(&v, _)| v);
    log_sum_exp_eps(pos, q_min) - log_sum_exp_eps(neg, q_min)
}

/// `h_log` plus the channel correlation `sum_j r_j d_j q_j`.
pub fn h_ldpc(state: &DecoderState, h: &ParityCheckMatrix, r: &[f64], q_min: f64) -> Result<f64> {
    Error::check_len(h.n(), r.len())?;
    Ok(h_log(state, h, q_min) + correlation(state, r))
}

fn correlation(state: &DecoderState, r: &[f64]) -> f64 {
    r.iter()
        .zip(&state.d)
        .zip(&state.q)
        .map(|((&rj, &dj), &qj)| rj * dj as f64 * qj)
        .sum()
}

/// Exact gradient of `h_ldpc` in `q` with the partition held fixed: the
/// softmax weight of each satisfied clause minus that of each unsatisfied
/// clause containing `j`, plus `r_j d_j`.
pub fn gradient_exact(
    state: &DecoderState,
    h: &ParityCheckMatrix,
    r: &[f64],
    q_min: f64,
) -> Result<Vec<f64>> {
    Error::check_len(h.n(), r.len())?;
    let mut z = Vec::with_capacity(h.m());
    clause_sums(&state.q, h, &mut z);
    let sat = &state.sat_mask;

    let mut weights = vec![0.0; h.m()];
    for want in [true, false] {
        let members = || {
            z.iter()
                .zip(sat)
                .filter(move |(_, &s)| s == want)
                .map(|(&v, _)| v)
        };
        let m = members().fold(q_min, f64::max);
        let denom: f64 = members().map(|v| (v - m).exp()).sum::<f64>() + (q_min - m).exp();
        let sign = if want { 1.0 } else { -1.0 };
        for i in (0..h.m()).filter(|&i| sat[i] == want) {
            weights[i] = sign * (z[i] - m).exp() / denom;
        }
    }

    Ok((0..h.n())
        .map(|j| {
            let check: f64 = h.col(j).iter().map(|&i| weights[i]).sum();
            check + r[j] * state.d[j] as f64
        })
        .collect())
}

/// Reusable buffers for one decode.
#[derive(Default)]
struct Workspace {
    z: Vec<f64>,
    z_pos: Vec<f64>,
    z_neg: Vec<f64>,
    contrib: Vec<f64>,
    in_support: Vec<bool>,
    check: Vec<f64>,
    sort: Vec<f64>,
    flipped: Vec<bool>,
}

/// Check-node part of the MP gradient,
/// `sum_i h_ij ([z+_i - zeta+]_+ - [z-_i - zeta-]_+) / (tau A_j)`.
///
/// A clause contributes only through the set it belongs to; its sentinel
/// entry in the other set shapes that set's offset but is never counted as
/// a score or toward `A_j`. Variables with `A_j = 0` get exactly zero.
fn check_terms(
    state: &DecoderState,
    h: &ParityCheckMatrix,
    q_min: f64,
    tau: f64,
    ws: &mut Workspace,
) {
    let m = h.m();
    clause_sums(&state.q, h, &mut ws.z);
    let sat = &state.sat_mask;

    ws.z_pos.clear();
    ws.z_neg.clear();
    for (&z, &s) in ws.z.iter().zip(sat) {
        ws.z_pos.push(if s { z } else { q_min });
        ws.z_neg.push(if s { q_min } else { z });
    }
    let n_pos = sat.iter().filter(|&&s| s).count();
    let zeta_pos = if n_pos > 0 {
        water_fill(&ws.z_pos, tau, &mut ws.sort)
    } else {
        f64::INFINITY
    };
    let zeta_neg = if n_pos < m {
        water_fill(&ws.z_neg, tau, &mut ws.sort)
    } else {
        f64::INFINITY
    };

    ws.contrib.clear();
    ws.in_support.clear();
    for (&z, &s) in ws.z.iter().zip(sat) {
        if s {
            ws.contrib.push(relu(z - zeta_pos));
            ws.in_support.push(z > zeta_pos);
        } else {
            ws.contrib.push(-relu(z - zeta_neg));
            ws.in_support.push(z > zeta_neg);
        }
    }

    ws.check.clear();
    for col in h.cols() {
        let mut num = 0.0;
        let mut count = 0usize;
        for &i in col {
            num += ws.contrib[i];
            count += ws.in_support[i] as usize;
        }
        ws.check.push(if count == 0 {
            0.0
        } else {
            num / (tau * count as f64)
        });
    }
}

/// MP-approximated gradient of `h_ldpc` at the current state and partition.
/// The correlation term is dropped when `params.normalize` is off.
pub fn gradient_mp(
    state: &DecoderState,
    h: &ParityCheckMatrix,
    r: &[f64],
    params: &MpHyperParams,
) -> Result<Vec<f64>> {
    Error::check_len(h.n(), r.len())?;
    let tau = params.resolve_tau(h)?;
    let mut ws = Workspace::default();
    check_terms(state, h, params.q_min, tau, &mut ws);
    Ok(ws
        .check
        .iter()
        .zip(r)
        .zip(&state.d)
        .map(|((&c, &rj), &dj)| {
            if params.normalize {
                c + rj * dj as f64
            } else {
                c
            }
        })
        .collect())
}

/// Result of one decoder iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepStatus {
    /// All clauses were already satisfied; the state is unchanged.
    Satisfied,
    /// One update was applied; carries the number of flipped bits.
    Updated { flips: usize },
}

fn step_with(
    state: &mut DecoderState,
    h: &ParityCheckMatrix,
    r: &[f64],
    params: &MpHyperParams,
    tau: f64,
    ws: &mut Workspace,
) -> StepStatus {
    if classify(state, h) == 0 {
        return StepStatus::Satisfied;
    }
    // gradient uses the partition from before this iteration's flips
    check_terms(state, h, params.q_min, tau, ws);

    ws.flipped.clear();
    ws.flipped.resize(h.n(), false);
    let mut flips = 0;
    match params.flip_mode {
        FlipMode::Multi => {
            for (j, &qj) in state.q.iter().enumerate() {
                if qj < params.theta {
                    ws.flipped[j] = true;
                    flips += 1;
                }
            }
        }
        FlipMode::Single => {
            let mut best: Option<usize> = None;
            for (j, &qj) in state.q.iter().enumerate() {
                if qj < params.theta && best.is_none_or(|b| qj < state.q[b]) {
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                ws.flipped[j] = true;
                flips = 1;
            }
        }
    }

    for j in 0..h.n() {
        if ws.flipped[j] {
            state.d[j] = -state.d[j];
        }
        let mut grad = ws.check[j];
        if params.normalize {
            grad += r[j] * state.d[j] as f64;
        }
        let mut q = state.q[j] + params.eta * grad;
        if params.clamp_q {
            q = q.min(0.0);
        }
        if params.reset_q_on_flip && ws.flipped[j] {
            q = 0.0;
        }
        state.q[j] = q;
    }
    state.iteration += 1;
    classify(state, h);
    StepStatus::Updated { flips }
}

/// One iteration: classify, stop if nothing is unsatisfied, compute the MP
/// offsets, flip, then apply the gradient update with the flipped `d`.
pub fn step(
    state: &mut DecoderState,
    h: &ParityCheckMatrix,
    r: &[f64],
    params: &MpHyperParams,
) -> Result<StepStatus> {
    Error::check_len(h.n(), r.len())?;
    Error::check_len(h.n(), state.d.len())?;
    let tau = params.resolve_tau(h)?;
    Ok(step_with(
        state,
        h,
        r,
        params,
        tau,
        &mut Workspace::default(),
    ))
}

fn run(
    r: &[f64],
    h: &ParityCheckMatrix,
    params: &MpHyperParams,
    trace: bool,
) -> Result<DecodeOutcome> {
    let tau = params.resolve_tau(h)?;
    let mut state = initialize(r, h, params)?;
    let mut ws = Workspace::default();
    let mut trajectory = trace.then(|| vec![state.satisfied()]);
    let converged = loop {
        if state.unsatisfied() == 0 {
            break true;
        }
        if state.iteration >= params.i_max {
            break false;
        }
        step_with(&mut state, h, r, params, tau, &mut ws);
        if let Some(t) = trajectory.as_mut() {
            t.push(state.satisfied());
        }
    };
    Ok(DecodeOutcome {
        decision: state.decision(),
        iterations_used: state.iteration,
        converged,
        trajectory,
    })
}

/// Decodes one frame of raw channel output.
pub fn decode(r: &[f64], h: &ParityCheckMatrix, params: &MpHyperParams) -> Result<DecodeOutcome> {
    run(r, h, params, false)
}

/// Like [`decode`], also recording the satisfied-clause count after
/// initialization and after every iteration.
pub fn decode_traced(
    r: &[f64],
    h: &ParityCheckMatrix,
    params: &MpHyperParams,
) -> Result<DecodeOutcome> {
    run(r, h, params, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::gaussian_generator;
    use crate::margin::oracle::bisect_zeta;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const MAJORITY_R: [f64; 3] = [0.1236, -1.376, 0.105];

    fn majority_params() -> MpHyperParams {
        MpHyperParams {
            theta: -2.1,
            eta: 0.5,
            tau: Some(2.0),
            i_max: 100,
            ..Default::default()
        }
    }

    #[test]
    fn majority_example_initial_state() {
        let h = ParityCheckMatrix::majority();
        let s = initialize(&MAJORITY_R, &h, &majority_params()).unwrap();
        assert_eq!(s.d, vec![1, -1, 1]);
        assert!((s.q[0] - 0.1236f64.tanh().ln()).abs() < 1e-15);
        assert!((s.q[0] + 2.0957).abs() < 1e-3);
        // d_2 = -1 makes -log(tanh 1.376) positive; projected to 0
        assert_eq!(s.q[1], 0.0);
        assert!((s.q[2] - 0.105f64.tanh().ln()).abs() < 1e-15);
        assert_eq!(s.satisfied(), 0);
    }

    #[test]
    fn majority_example_unclamped_keeps_sign() {
        let h = ParityCheckMatrix::majority();
        let p = MpHyperParams {
            clamp_q: false,
            ..majority_params()
        };
        let s = initialize(&MAJORITY_R, &h, &p).unwrap();
        assert!((s.q[1] + 1.376f64.tanh().ln()).abs() < 1e-15);
        assert!(s.q[1] > 0.0);
    }

    #[test]
    fn zero_input_is_finite() {
        let h = ParityCheckMatrix::majority();
        let s = initialize(&[0.0, -1.0, -1.0], &h, &MpHyperParams::default()).unwrap();
        assert_eq!(s.d[0], 1);
        assert!((s.q[0] - 1e-12f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn noiseless_init_satisfies_all() {
        let h = ParityCheckMatrix::hamming74();
        let c = BinaryWord::new(vec![1, 1, 0, 0, 0, 1, 1]);
        assert!(h.is_codeword(&c).unwrap());
        let r: Vec<f64> = c.to_bipolar().iter().map(|s| 5.0 * s).collect();
        let s = initialize(&r, &h, &MpHyperParams::default()).unwrap();
        assert!(s.sat_mask.iter().all(|&b| b));
    }

    #[test]
    fn classify_examples() {
        let h = ParityCheckMatrix::majority();
        let mut s = initialize(&[1.0, 1.0, 1.0], &h, &MpHyperParams::default()).unwrap();
        assert_eq!(classify(&mut s, &h), 0);
        s.d = vec![1, -1, 1];
        assert_eq!(classify(&mut s, &h), 2);
    }

    #[test]
    fn classify_matches_syndrome() {
        let h = ParityCheckMatrix::random_regular(24, 32, 3, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let r: Vec<f64> = (0..32).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut s = initialize(&r, &h, &MpHyperParams::default()).unwrap();
            classify(&mut s, &h);
            let syn = h.syndrome(&s.decision()).unwrap();
            for (sat, bit) in s.sat_mask.iter().zip(syn.bits()) {
                assert_eq!(*sat, *bit == 0);
            }
        }
    }

    #[test]
    fn h_log_closed_forms() {
        let h = ParityCheckMatrix::hamming74();
        let mut s = initialize(&[-3.0; 7], &h, &MpHyperParams::default()).unwrap();
        s.q = vec![0.0; 7];
        let v = h_log(&s, &h, -30.0);
        let expect = (3.0 + (-30f64).exp()).ln() + 30.0;
        assert!((v - expect).abs() < 1e-12);

        // flip one bit so every clause containing it is unsatisfied
        s.d[3] = 1;
        classify(&mut s, &h);
        assert_eq!(s.satisfied(), 0);
        let v = h_log(&s, &h, -30.0);
        let expect = -30.0 - (3.0 + (-30f64).exp()).ln();
        assert!((v - expect).abs() < 1e-12);
    }

    fn naive_h_log(s: &DecoderState, h: &ParityCheckMatrix, q_min: f64) -> f64 {
        let eps = q_min.exp();
        let mut pos = eps;
        let mut neg = eps;
        for (i, row) in h.rows().iter().enumerate() {
            let z: f64 = row.iter().map(|&j| s.q[j]).sum();
            if s.sat_mask[i] {
                pos += z.exp();
            } else {
                neg += z.exp();
            }
        }
        pos.ln() - neg.ln()
    }

    #[test]
    fn h_log_matches_naive_sum_on_majority_example() {
        let h = ParityCheckMatrix::majority();
        let s = initialize(&MAJORITY_R, &h, &majority_params()).unwrap();
        let v = h_log(&s, &h, -30.0);
        assert!((v - naive_h_log(&s, &h, -30.0)).abs() < 1e-12);
    }

    #[test]
    fn h_ldpc_terms() {
        let h = ParityCheckMatrix::majority();
        let s = initialize(&MAJORITY_R, &h, &majority_params()).unwrap();
        let zero = [0.0; 3];
        assert_eq!(h_ldpc(&s, &h, &zero, -30.0).unwrap(), h_log(&s, &h, -30.0));
        let corr: f64 = (0..3).map(|j| MAJORITY_R[j] * s.d[j] as f64 * s.q[j]).sum();
        let v = h_ldpc(&s, &h, &MAJORITY_R, -30.0).unwrap();
        assert!((v - naive_h_log(&s, &h, -30.0) - corr).abs() < 1e-12);

        let mut s0 = s.clone();
        s0.q = vec![0.0; 3];
        assert_eq!(
            h_ldpc(&s0, &h, &MAJORITY_R, -30.0).unwrap(),
            h_log(&s0, &h, -30.0)
        );
    }

    fn finite_difference(
        s: &DecoderState,
        h: &ParityCheckMatrix,
        r: &[f64],
        q_min: f64,
        j: usize,
    ) -> f64 {
        let step = 1e-6;
        let mut up = s.clone();
        up.q[j] += step;
        let mut down = s.clone();
        down.q[j] -= step;
        (h_ldpc(&up, h, r, q_min).unwrap() - h_ldpc(&down, h, r, q_min).unwrap()) / (2.0 * step)
    }

    #[test]
    fn single_clause_gradient() {
        let h = ParityCheckMatrix::from_rows(3, vec![vec![0, 1, 2]]).unwrap();
        let r = [0.5, -0.25, 1.0];
        let mut s = initialize(&[1.0, 1.0, 1.0], &h, &MpHyperParams::default()).unwrap();
        s.q = vec![0.0; 3];
        let g = gradient_exact(&s, &h, &r, -30.0).unwrap();
        let w = 1.0 / (1.0 + (-30f64).exp());
        for j in 0..3 {
            assert!((g[j] - (w + r[j])).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_gradient_majority_example_finite_difference() {
        let h = ParityCheckMatrix::majority();
        let s = initialize(&MAJORITY_R, &h, &majority_params()).unwrap();
        let g = gradient_exact(&s, &h, &MAJORITY_R, -30.0).unwrap();
        for j in 0..3 {
            let fd = finite_difference(&s, &h, &MAJORITY_R, -30.0, j);
            assert!(
                (fd - g[j]).abs() <= 1e-5 * g[j].abs().max(1.0),
                "{j}: {fd} vs {}",
                g[j]
            );
        }
    }

    #[test]
    fn mp_gradient_uniform_satisfied() {
        // all clauses satisfied with equal sums; P- is empty
        let h = ParityCheckMatrix::random_regular(6, 12, 3, 2).unwrap();
        let mut s = initialize(&[-1.0; 12], &h, &MpHyperParams::default()).unwrap();
        s.q = vec![-0.5; 12];
        let p = MpHyperParams {
            tau: None,
            normalize: false,
            ..Default::default()
        };
        let g = gradient_mp(&s, &h, &[0.0; 12], &p).unwrap();
        // every clause sum is -3; oracle zeta over the sentinel-free vector
        let zeta = bisect_zeta(&[-3.0; 6], 6.0);
        let each = -3.0 - zeta;
        for gj in g {
            let expect = 3.0 * each / (6.0 * 3.0);
            assert!((gj - expect).abs() < 1e-9, "{gj} vs {expect}");
        }
    }

    #[test]
    fn mp_gradient_respects_symmetry() {
        // swapping variables 0 and 2 is an automorphism of the majority code
        let h = ParityCheckMatrix::majority();
        let mut s = initialize(&[0.3, -0.8, 0.3], &h, &MpHyperParams::default()).unwrap();
        s.q = vec![-1.0, -0.2, -1.0];
        let g = gradient_mp(
            &s,
            &h,
            &[0.0; 3],
            &MpHyperParams {
                tau: Some(2.0),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(g[0], g[2]);
    }

    #[test]
    fn mp_gradient_zero_without_support() {
        // variable 4 sits only in a clause whose score is pushed out of support
        let h = ParityCheckMatrix::from_rows(5, vec![vec![0, 1], vec![1, 2], vec![3, 4]]).unwrap();
        let mut s = initialize(&[-1.0; 5], &h, &MpHyperParams::default()).unwrap();
        s.q = vec![0.0, 0.0, 0.0, -10.0, -10.0];
        let p = MpHyperParams {
            tau: Some(0.5),
            normalize: false,
            ..Default::default()
        };
        let g = gradient_mp(&s, &h, &[0.0; 5], &p).unwrap();
        assert_eq!(g[3], 0.0);
        assert_eq!(g[4], 0.0);
        assert!(g[1] > 0.0);
    }

    #[test]
    fn majority_example_first_iteration_direction() {
        let h = ParityCheckMatrix::majority();
        let p = majority_params();
        let mut s = initialize(&MAJORITY_R, &h, &p).unwrap();
        let q0 = s.q.clone();
        step(&mut s, &h, &MAJORITY_R, &p).unwrap();
        assert_eq!(s.q[1], 0.0);
        assert!(s.q[0] < q0[0]);
        assert!(s.q[0] < p.theta, "q1 must cross theta by iteration 2");
        // bit 3 flipped in iteration 1
        assert_eq!(s.d, vec![1, -1, -1]);
    }

    #[test]
    fn majority_example_run() {
        let h = ParityCheckMatrix::majority();
        let p = majority_params();
        let mut s = initialize(&MAJORITY_R, &h, &p).unwrap();
        let mut bit2 = vec![s.d[1]];
        let mut sat = vec![s.satisfied()];
        while let StepStatus::Updated { .. } = step(&mut s, &h, &MAJORITY_R, &p).unwrap() {
            bit2.push(s.d[1]);
            sat.push(s.satisfied());
            assert!(s.iteration <= 5);
        }
        assert!(bit2.iter().all(|&d| d == -1));
        assert_eq!(s.decision().bits(), &[0, 0, 0]);
        assert_eq!(sat.first(), Some(&0));
        assert_eq!(sat.last(), Some(&2));

        let out = decode(&MAJORITY_R, &h, &p).unwrap();
        assert!(out.converged);
        assert!(out.iterations_used <= 5);
        assert_eq!(out.decision.bits(), &[0, 0, 0]);
    }

    #[test]
    fn satisfied_state_step_is_noop() {
        let h = ParityCheckMatrix::majority();
        let p = MpHyperParams::default();
        let mut s = initialize(&[1.0, 1.0, 1.0], &h, &p).unwrap();
        let before = s.clone();
        assert_eq!(
            step(&mut s, &h, &[1.0; 3], &p).unwrap(),
            StepStatus::Satisfied
        );
        assert_eq!(s, before);
    }

    #[test]
    fn single_versus_multi_flip() {
        let h = ParityCheckMatrix::hamming74();
        let r = [0.05, 0.08, -2.0, -2.0, -2.0, -2.0, -2.0];
        let multi = MpHyperParams {
            theta: -1.0,
            ..Default::default()
        };
        let single = MpHyperParams {
            flip_mode: FlipMode::Single,
            ..multi.clone()
        };
        let mut a = initialize(&r, &h, &multi).unwrap();
        assert!(a.q[0] < -1.0 && a.q[1] < -1.0 && a.q[0] < a.q[1]);
        let mut b = a.clone();
        assert_eq!(
            step(&mut a, &h, &r, &multi).unwrap(),
            StepStatus::Updated { flips: 2 }
        );
        assert_eq!(&a.d[..2], &[-1, -1]);
        assert_eq!(
            step(&mut b, &h, &r, &single).unwrap(),
            StepStatus::Updated { flips: 1 }
        );
        assert_eq!(&b.d[..2], &[-1, 1]);
    }

    #[test]
    fn reset_on_flip() {
        let h = ParityCheckMatrix::majority();
        let p = MpHyperParams {
            reset_q_on_flip: true,
            ..majority_params()
        };
        let mut s = initialize(&MAJORITY_R, &h, &p).unwrap();
        step(&mut s, &h, &MAJORITY_R, &p).unwrap();
        assert_eq!(s.q[2], 0.0);
    }

    #[test]
    fn noiseless_decode_is_identity() {
        let h = ParityCheckMatrix::hamming74();
        let g = gaussian_generator(&h);
        for msg in 0u8..16 {
            let bits: Vec<u8> = (0..4).map(|b| (msg >> b) & 1).collect();
            let c = g.encode(&bits);
            let r: Vec<f64> = c.to_bipolar().iter().map(|s| 5.0 * s).collect();
            let out = decode(&r, &h, &MpHyperParams::default()).unwrap();
            assert!(out.converged);
            assert_eq!(out.iterations_used, 0);
            assert_eq!(out.decision, c);
        }
    }

    #[test]
    fn converged_implies_codeword_and_is_deterministic() {
        let h = ParityCheckMatrix::random_regular(24, 32, 3, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let r: Vec<f64> = (0..32)
                .map(|_| -1.0 + 0.9 * rng.random_range(-2.0..2.0))
                .collect();
            let p = MpHyperParams::default();
            let a = decode(&r, &h, &p).unwrap();
            if a.converged {
                assert!(h.is_codeword(&a.decision).unwrap());
            }
            assert_eq!(a, decode(&r, &h, &p).unwrap());
        }
    }

    #[test]
    fn dimension_mismatch() {
        let h = ParityCheckMatrix::majority();
        assert!(matches!(
            decode(&[1.0, 2.0], &h, &MpHyperParams::default()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn invalid_params() {
        let h = ParityCheckMatrix::majority();
        for p in [
            MpHyperParams {
                eta: 0.0,
                ..Default::default()
            },
            MpHyperParams {
                tau: Some(-1.0),
                ..Default::default()
            },
            MpHyperParams {
                i_max: 0,
                ..Default::default()
            },
            MpHyperParams {
                q_min: 0.0,
                ..Default::default()
            },
        ] {
            assert!(decode(&[1.0; 3], &h, &p).is_err());
        }
    }

    #[test]
    fn h_log_invariant_under_relabeling() {
        // permute clause order and variable order together
        let h = ParityCheckMatrix::hamming74();
        let perm = [6usize, 0, 3, 1, 5, 2, 4];
        let rows: Vec<Vec<usize>> = h
            .rows()
            .iter()
            .rev()
            .map(|row| row.iter().map(|&j| perm[j]).collect())
            .collect();
        let h2 = ParityCheckMatrix::from_rows(7, rows).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let r: Vec<f64> = (0..7).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut r2 = vec![0.0; 7];
            for j in 0..7 {
                r2[perm[j]] = r[j];
            }
            let p = MpHyperParams {
                clamp_q: false,
                ..Default::default()
            };
            let s = initialize(&r, &h, &p).unwrap();
            let s2 = initialize(&r2, &h2, &p).unwrap();
            assert!((h_log(&s, &h, -30.0) - h_log(&s2, &h2, -30.0)).abs() < 1e-12);
        }
    }
}
