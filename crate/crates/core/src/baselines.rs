//! Relay receivers: the proposed SAGE + ICI-cancellation front end and the
//! three comparison front ends. Every receiver hands the same back end
//! (`MappedBlock` → XOR LLRs → shared decoder) its cancelled samples and
//! per-subcarrier gains, so only the front-end compensation differs.

use crate::ici::{cancel, reconstruct_ici};
use crate::linalg::{apply_ramp, cfo_ramp, ComplexBlock};
use crate::plnc::{block_xor_llrs, XorLlrs};
use crate::sage::{gains_on_allocation, run_sage, ParamEstimate, SageContext, SageOptions, SageTrace};
use crate::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Receiver {
    /// SAGE estimation, ICI reconstruction and cancellation.
    Proposed,
    /// Zero-CFO realization with perfectly known channels.
    SyncGenie,
    /// Compensation by the mean of the two CFOs, no ICI cancellation.
    MeanCfo,
    /// Preamble channels applied directly to the uncompensated samples.
    NoCompensation,
}

impl Receiver {
    pub const ALL: [Receiver; 4] = [
        Receiver::Proposed,
        Receiver::SyncGenie,
        Receiver::MeanCfo,
        Receiver::NoCompensation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Receiver::Proposed => "proposed",
            Receiver::SyncGenie => "sync",
            Receiver::MeanCfo => "mean",
            Receiver::NoCompensation => "nocomp",
        }
    }
}

impl fmt::Display for Receiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Receiver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Receiver::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::config(format!("unknown receiver `{s}` (proposed, sync, mean, nocomp)")))
    }
}

/// Front-end output of one block: samples on the allocated subcarriers and
/// the gains `Γ_1`, `Γ_2` the pair posterior is evaluated against.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedBlock {
    pub samples: Vec<Complex64>,
    pub gains: [Vec<Complex64>; 2],
}

impl MappedBlock {
    /// XOR LLRs of this block; the shared back end of every receiver.
    pub fn xor_llrs(&self, ctx: &SageContext) -> Result<XorLlrs> {
        block_xor_llrs(
            &self.samples,
            [&self.gains[0], &self.gains[1]],
            ctx.noise_var,
            &ctx.constellation,
        )
    }
}

/// Synchronous-style mapping: no compensation beyond what the caller already
/// applied, `Γ_i = A^T D h_i`.
pub fn synchronous_mapping(ctx: &SageContext, y: &ComplexBlock, taps: [&[Complex64]; 2]) -> Result<MappedBlock> {
    let yf = ctx.dft.apply_fh(y)?;
    let samples = ctx.alloc.deallocate(yf.samples())?;
    let gain = |t: &[Complex64]| -> Result<Vec<Complex64>> {
        let resp = ctx.dft.apply_d_cols(t)?;
        ctx.alloc.deallocate(resp.samples())
    };
    Ok(MappedBlock {
        samples,
        gains: [gain(taps[0])?, gain(taps[1])?],
    })
}

/// Benchmark receiver fed the zero-CFO observation and the true channels.
pub fn sync_genie_receiver(
    ctx: &SageContext,
    y_sync: &ComplexBlock,
    true_taps: [&[Complex64]; 2],
) -> Result<MappedBlock> {
    synchronous_mapping(ctx, y_sync, true_taps)
}

/// Mean operation: derotates by `-(ε̂_1 + ε̂_2)/2`, then maps synchronously.
pub fn mean_cfo_receiver(
    ctx: &SageContext,
    y: &ComplexBlock,
    eps: [f64; 2],
    taps: [&[Complex64]; 2],
) -> Result<MappedBlock> {
    let compensated = mean_compensate(y, eps)?;
    synchronous_mapping(ctx, &compensated, taps)
}

/// Applies `ramp(-(ε_1 + ε_2)/2)` to a time-domain block.
pub fn mean_compensate(y: &ComplexBlock, eps: [f64; 2]) -> Result<ComplexBlock> {
    let ramp = cfo_ramp(-(eps[0] + eps[1]) / 2.0, y.len())?;
    apply_ramp(&ramp, y)
}

pub fn no_compensation_receiver(ctx: &SageContext, y: &ComplexBlock, taps: [&[Complex64]; 2]) -> Result<MappedBlock> {
    synchronous_mapping(ctx, y, taps)
}

/// Proposed receiver on one block: SAGE from `init`, then ICI
/// reconstruction and cancellation, with `Γ_i = A^T Λ̂_i D ĥ_i`.
pub fn proposed_receiver(
    ctx: &SageContext,
    y: &ComplexBlock,
    init: &ParamEstimate,
    options: &SageOptions,
    truth: Option<&[Vec<Complex64>; 2]>,
) -> Result<(MappedBlock, ParamEstimate, SageTrace)> {
    let (est, trace) = run_sage(ctx, y, init, options, truth)?;
    let mapped = cancel_and_map(ctx, y, &est)?;
    Ok((mapped, est, trace))
}

/// ICI cancellation and gain computation for a given joint estimate.
pub fn cancel_and_map(ctx: &SageContext, y: &ComplexBlock, est: &ParamEstimate) -> Result<MappedBlock> {
    let yf = ctx.dft.apply_fh(y)?;
    let ici = reconstruct_ici(&ctx.dft, est, &ctx.alloc)?;
    let samples = cancel(&yf, &ici, &ctx.alloc)?;
    Ok(MappedBlock {
        samples,
        gains: [
            gains_on_allocation(ctx, est.eps[0], &est.taps[0])?,
            gains_on_allocation(ctx, est.eps[1], &est.taps[1])?,
        ],
    })
}
