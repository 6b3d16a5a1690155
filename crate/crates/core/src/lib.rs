//! Margin-propagation XOR-SAT decoding of LDPC codes.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`], [`alist`] and [`gf2`] hold parity-check matrices, codeword
//!   predicates, the alist interchange format and GF(2) elimination.
//! * [`channel`] maps codewords to BPSK symbols and adds seeded AWGN.
//! * [`margin`] is the margin-propagation (reverse water-filling) primitive.
//! * [`mpsat`] is the MP-XOR-SAT bit-flipping decoder together with the
//!   log-sum-exp objective and its exact gradient.
//! * [`spa`] and [`gdbf`] are the reference decoders.
//! * [`sim`] is the Monte-Carlo BER/FER harness and its CSV output.

pub mod alist;
pub mod channel;
pub mod decoder;
pub mod error;
pub mod gdbf;
pub mod gf2;
pub mod margin;
pub mod matrix;
pub mod mpsat;
pub mod sim;
pub mod spa;

pub use decoder::{DecodeOutcome, Decoder};
pub use error::{Error, Result};
pub use matrix::{BinaryWord, ParityCheckMatrix};
