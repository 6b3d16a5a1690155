//! BPSK over AWGN with per-frame reproducible noise streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::BinaryWord;

/// Eb/N0 in dB together with the code rate k/N.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub eb_n0_db: f64,
    pub rate: f64,
}

/// Noise standard deviation for unit-energy BPSK:
/// `sigma = sqrt(1 / (2 * rate * 10^(EbN0/10)))`.
pub fn sigma_from_ebn0(spec: NoiseSpec) -> Result<f64> {
    if !(spec.rate > 0.0 && spec.rate <= 1.0) {
        return Err(Error::invalid(format!(
            "code rate {} outside (0, 1]",
            spec.rate
        )));
    }
    if !spec.eb_n0_db.is_finite() {
        return Err(Error::invalid("Eb/N0 must be finite"));
    }
    let ebn0 = 10f64.powf(spec.eb_n0_db / 10.0);
    Ok((1.0 / (2.0 * spec.rate * ebn0)).sqrt())
}

/// One transmitted and received frame.
#[derive(Clone, Debug)]
pub struct ChannelFrame {
    pub codeword: BinaryWord,
    pub symbols: Vec<f64>,
    pub received: Vec<f64>,
    pub sigma: f64,
}

/// Random stream for frame `frame` of a run seeded with `seed`.
///
/// ChaCha is counter based, so the stream for any frame is available
/// without generating the ones before it.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// Maps `c` to BPSK and adds `sigma`-scaled standard normal noise drawn from `rng`.
pub fn transmit<R: Rng + ?Sized>(c: &BinaryWord, sigma: f64, rng: &mut R) -> ChannelFrame {
    let symbols = c.to_bipolar();
    let received = symbols
        .iter()
        .map(|&s| {
            let g: f64 = rng.sample(StandardNormal);
            s + sigma * g
        })
        .collect();
    ChannelFrame {
        codeword: c.clone(),
        symbols,
        received,
        sigma,
    }
}

/// Uncoded BPSK bit error probability `Q(sqrt(2 * rate * Eb/N0))`.
pub fn uncoded_ber(eb_n0_db: f64, rate: f64) -> f64 {
    let x = (2.0 * rate * 10f64.powf(eb_n0_db / 10.0)).sqrt();
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}
