//! Margin propagation.
//!
//! Given scores `y` and a margin `tau > 0`, the offset `zeta` is the unique
//! solution of `sum_i [y_i - zeta]_+ = tau`, and the probability scores are
//! `P_i = [y_i - zeta]_+ / tau`. Scores sum to one, entries at or below the
//! offset get exactly zero, and only subtraction, comparison and one
//! division by the support size are needed.

use crate::error::{Error, Result};

/// Solution of the margin-propagation normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct MpResult {
    pub zeta: f64,
    pub scores: Vec<f64>,
    /// Indices with `y_i > zeta`, ascending.
    pub support: Vec<usize>,
}

fn validate(y: &[f64], tau: f64) -> Result<()> {
    if y.is_empty() {
        return Err(Error::invalid("margin propagation needs a nonempty input"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!(
            "margin tau must be positive, got {tau}"
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("margin propagation input must be finite"));
    }
    Ok(())
}

/// Reverse water-filling on a scratch buffer. Inputs are assumed valid.
///
/// Sorts descending and scans prefix sizes k = 1..M; the first
/// `zeta_k = (top-k sum - tau) / k` that is not below the (k+1)-th largest
/// value is the solution. The last interval is unbounded below.
pub(crate) fn water_fill(y: &[f64], tau: f64, scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend_from_slice(y);
    scratch.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    for k in 0..scratch.len() {
        prefix += scratch[k];
        let zeta = (prefix - tau) / (k + 1) as f64;
        match scratch.get(k + 1) {
            Some(&next) if zeta < next => continue,
            _ => return zeta,
        }
    }
    unreachable!("the final prefix always terminates the scan")
}

/// Offset `zeta` only.
pub fn mp_offset(y: &[f64], tau: f64) -> Result<f64> {
    validate(y, tau)?;
    Ok(water_fill(y, tau, &mut Vec::with_capacity(y.len())))
}

pub fn mp(y: &[f64], tau: f64) -> Result<MpResult> {
    let zeta = mp_offset(y, tau)?;
    let scores = y.iter().map(|&v| relu(v - zeta) / tau).collect();
    let support = (0..y.len()).filter(|&i| y[i] > zeta).collect();
    Ok(MpResult {
        zeta,
        scores,
        support,
    })
}

pub fn mp_scores(y: &[f64], tau: f64) -> Result<Vec<f64>> {
    mp(y, tau).map(|r| r.scores)
}

#[inline]
pub(crate) fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}
