//! Common decoder interface used by the harness and the CLI.

use crate::error::{Error, Result};
use crate::gdbf::{self, GdbfParams};
use crate::matrix::{BinaryWord, ParityCheckMatrix};
use crate::mpsat::{self, MpHyperParams};
use crate::spa::{self, SpaParams};

/// Result of decoding one frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Hard decision `u`.
    pub decision: BinaryWord,
    /// Iterations run after initialization.
    pub iterations_used: usize,
    /// All clauses satisfied on exit; implies `decision` is a codeword.
    pub converged: bool,
    /// Satisfied-clause count per iteration, when requested.
    pub trajectory: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decoder {
    MpXorSat(MpHyperParams),
    Spa(SpaParams),
    Gdbf(GdbfParams),
}

impl Decoder {
    /// Short identifier used on the command line and in CSV output.
    pub fn id(&self) -> &'static str {
        match self {
            Decoder::MpXorSat(_) => "mpxorsat",
            Decoder::Spa(_) => "spa",
            Decoder::Gdbf(_) => "gdbf",
        }
    }

    pub fn i_max(&self) -> usize {
        match self {
            Decoder::MpXorSat(p) => p.i_max,
            Decoder::Spa(p) => p.i_max,
            Decoder::Gdbf(p) => p.i_max,
        }
    }

    pub fn set_i_max(&mut self, i_max: usize) {
        match self {
            Decoder::MpXorSat(p) => p.i_max = i_max,
            Decoder::Spa(p) => p.i_max = i_max,
            Decoder::Gdbf(p) => p.i_max = i_max,
        }
    }

    /// Default-parameter decoder for an identifier.
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "mpxorsat" | "mp" => Ok(Decoder::MpXorSat(MpHyperParams::default())),
            "spa" => Ok(Decoder::Spa(SpaParams::default())),
            "gdbf" => Ok(Decoder::Gdbf(GdbfParams::default())),
            other => Err(Error::invalid(format!("unknown decoder '{other}'"))),
        }
    }

    /// Decodes raw channel output `r`. `sigma` is the channel noise level;
    /// only SPA and LLR-scaled MP-XOR-SAT use it.
    pub fn decode(&self, r: &[f64], h: &ParityCheckMatrix, sigma: f64) -> Result<DecodeOutcome> {
        match self {
            Decoder::MpXorSat(p) if p.llr_input => {
                check_sigma(sigma)?;
                let scale = 2.0 / (sigma * sigma);
                let llr: Vec<f64> = r.iter().map(|v| v * scale).collect();
                mpsat::decode(&llr, h, p)
            }
            Decoder::MpXorSat(p) => mpsat::decode(r, h, p),
            Decoder::Spa(p) => spa::spa_decode(r, h, sigma, p),
            Decoder::Gdbf(p) => gdbf::gdbf_decode(r, h, p),
        }
    }
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "sigma must be positive, got {sigma}"
        )))
    }
}
