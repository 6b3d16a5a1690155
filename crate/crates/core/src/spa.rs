//! Log-domain sum-product decoder with a flooding schedule.

use crate::decoder::check_sigma;
use crate::error::{Error, Result};
use crate::matrix::{BinaryWord, ParityCheckMatrix};
use crate::DecodeOutcome;

#[derive(Clone, Debug, PartialEq)]
pub struct SpaParams {
    pub i_max: usize,
    /// Magnitude cap on every message.
    pub llr_clip: f64,
}

impl Default for SpaParams {
    fn default() -> Self {
        SpaParams {
            i_max: 100,
            llr_clip: 30.0,
        }
    }
}

// keeps atanh finite when the tanh product rounds to +-1
const MAX_TANH: f64 = 1.0 - 1e-15;

/// Sum-product decoding of BPSK/AWGN output `r` at noise level `sigma`.
///
/// Messages are log-likelihood ratios `log P(0)/P(1)`, initialised to
/// `-2 r / sigma^2`. Checks use the tanh rule, variables sum their inputs,
/// and decoding stops at the first all-zero syndrome.
pub fn spa_decode(
    r: &[f64],
    h: &ParityCheckMatrix,
    sigma: f64,
    params: &SpaParams,
) -> Result<DecodeOutcome> {
    Error::check_len(h.n(), r.len())?;
    check_sigma(sigma)?;
    if params.i_max == 0 || params.llr_clip.is_nan() || params.llr_clip <= 0.0 {
        return Err(Error::invalid("SPA needs i_max >= 1 and llr_clip > 0"));
    }
    let clip = |v: f64| v.clamp(-params.llr_clip, params.llr_clip);
    let scale = -2.0 / (sigma * sigma);
    let channel: Vec<f64> = r.iter().map(|&v| clip(v * scale)).collect();

    // edges in row-major order; for each variable, the edges touching it
    let mut row_start = Vec::with_capacity(h.m() + 1);
    let mut edge_var = Vec::with_capacity(h.edges());
    for row in h.rows() {
        row_start.push(edge_var.len());
        edge_var.extend_from_slice(row);
    }
    row_start.push(edge_var.len());
    let mut var_edges: Vec<Vec<usize>> = vec![Vec::new(); h.n()];
    for (e, &j) in edge_var.iter().enumerate() {
        var_edges[j].push(e);
    }

    let mut v2c: Vec<f64> = edge_var.iter().map(|&j| channel[j]).collect();
    let mut c2v = vec![0.0; edge_var.len()];
    let mut total = channel.clone();
    let mut bits = vec![0u8; h.n()];
    let mut prefix = Vec::new();

    let decide = |total: &[f64], bits: &mut Vec<u8>| {
        for (b, &t) in bits.iter_mut().zip(total) {
            *b = (t < 0.0) as u8;
        }
    };

    decide(&total, &mut bits);
    let mut word = BinaryWord::new(bits.clone());
    if h.is_codeword(&word)? {
        return Ok(DecodeOutcome {
            decision: word,
            iterations_used: 0,
            converged: true,
            trajectory: None,
        });
    }

    for iter in 1..=params.i_max {
        for i in 0..h.m() {
            let (a, b) = (row_start[i], row_start[i + 1]);
            let t: Vec<f64> = v2c[a..b].iter().map(|&m| (0.5 * m).tanh()).collect();
            // product of all other inputs via prefix/suffix products
            prefix.clear();
            let mut acc = 1.0;
            for &x in &t {
                prefix.push(acc);
                acc *= x;
            }
            let mut suffix = 1.0;
            for k in (0..t.len()).rev() {
                let p = (prefix[k] * suffix).clamp(-MAX_TANH, MAX_TANH);
                c2v[a + k] = clip(2.0 * p.atanh());
                suffix *= t[k];
            }
        }
        for (j, edges) in var_edges.iter().enumerate() {
            let sum: f64 = channel[j] + edges.iter().map(|&e| c2v[e]).sum::<f64>();
            total[j] = sum;
            for &e in edges {
                v2c[e] = clip(sum - c2v[e]);
            }
        }
        decide(&total, &mut bits);
        word = BinaryWord::new(bits.clone());
        if h.is_codeword(&word)? {
            return Ok(DecodeOutcome {
                decision: word,
                iterations_used: iter,
                converged: true,
                trajectory: None,
            });
        }
    }
    Ok(DecodeOutcome {
        decision: word,
        iterations_used: params.i_max,
        converged: false,
        trajectory: None,
    })
}
