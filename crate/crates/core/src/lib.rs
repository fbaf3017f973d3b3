//! Asynchronous physical-layer network coding (PLNC) for a two-way OFDM relay.
//!
//! Two terminals transmit BPSK-modulated, LDPC-coded OFDM blocks to a relay at
//! the same time, each with its own carrier frequency offset (CFO). The relay
//! never separates the two messages; it maps the superimposed block straight
//! to the XOR of the two terminals' messages. This crate contains:
//!
//! * a block-level baseband simulator of the multiple-access phase
//!   ([`ofdm`], [`channel`]),
//! * the relay receiver: iterative SAGE estimation of CFOs, channels and
//!   symbols ([`sage`]), ICI reconstruction and cancellation ([`ici`]),
//!   per-subcarrier pair posteriors and XOR LLRs ([`plnc`]) and a QC-LDPC
//!   code with a sum-product decoder ([`ldpc`]),
//! * the comparison receivers ([`baselines`]),
//! * a seeded, deterministic Monte Carlo harness ([`harness`]) with optional
//!   rayon parallelism over frames (`parallel` feature, on by default).

pub mod baselines;
pub mod channel;
pub mod counters;
mod error;
pub mod harness;
pub mod ici;
pub mod ldpc;
pub mod linalg;
pub mod ofdm;
pub mod plnc;
pub mod sage;
pub mod seed;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Largest CFO magnitude (in subcarrier spacings) the receiver accepts.
pub const MAX_ABS_CFO: f64 = 0.5;
