//! Gradient-descent bit flipping baseline.
//!
//! Bipolar decisions `x` start at `sign(r)`; each iteration evaluates the
//! inversion function `E_j = x_j r_j + sum_{i in cols j} prod_{k in row i} x_k`
//! and flips the least reliable bits.

use crate::error::{Error, Result};
use crate::matrix::{BinaryWord, ParityCheckMatrix};
use crate::mpsat::FlipMode;
use crate::DecodeOutcome;

#[derive(Clone, Debug, PartialEq)]
pub struct GdbfParams {
    pub i_max: usize,
    pub flip_mode: FlipMode,
    /// Inversion threshold used in multi-flip mode.
    pub theta: f64,
}

impl Default for GdbfParams {
    fn default() -> Self {
        GdbfParams {
            i_max: 100,
            flip_mode: FlipMode::Single,
            theta: -0.6,
        }
    }
}

/// Inversion function values for the bipolar word `x`.
pub fn inversion(x: &[i8], r: &[f64], h: &ParityCheckMatrix) -> Vec<f64> {
    let checks: Vec<f64> = h
        .rows()
        .iter()
        .map(|row| {
            if row.iter().filter(|&&k| x[k] < 0).count() % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    (0..h.n())
        .map(|j| x[j] as f64 * r[j] + h.col(j).iter().map(|&i| checks[i]).sum::<f64>())
        .collect()
}

pub fn gdbf_decode(r: &[f64], h: &ParityCheckMatrix, params: &GdbfParams) -> Result<DecodeOutcome> {
    Error::check_len(h.n(), r.len())?;
    if params.i_max == 0 {
        return Err(Error::invalid("i_max must be at least 1"));
    }
    let mut x: Vec<i8> = r.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect();
    let mut iter = 0;
    let converged = loop {
        if h.unsatisfied_bipolar(&x) == 0 {
            break true;
        }
        if iter == params.i_max {
            break false;
        }
        let e = inversion(&x, r, h);
        match params.flip_mode {
            FlipMode::Single => {
                // lowest index wins ties
                let j = (0..e.len()).fold(0, |best, j| if e[j] < e[best] { j } else { best });
                x[j] = -x[j];
            }
            FlipMode::Multi => {
                for (xj, &ej) in x.iter_mut().zip(&e) {
                    if ej < params.theta {
                        *xj = -*xj;
                    }
                }
            }
        }
        iter += 1;
    };
    Ok(DecodeOutcome {
        decision: BinaryWord::from_bipolar(&x),
        iterations_used: iter,
        converged,
        trajectory: None,
    })
}
