//! One Monte Carlo frame: data, channels, noise, and every selected receiver.

use super::config::{CfoUpdateMode, SimConfig, SweepPoint};
use crate::baselines::{
    mean_cfo_receiver, mean_compensate, no_compensation_receiver, proposed_receiver, sync_genie_receiver,
    MappedBlock, Receiver,
};
use crate::channel::{complex_gaussian, CfoMode, draw_cir, expected_mac_power, noise_variance};
use crate::counters::{self, OpCounts};
use crate::ldpc::QcLdpcCode;
use crate::linalg::ComplexBlock;
use crate::ofdm::{mac_signal_model, segment_into_blocks, TerminalFrame};
use crate::plnc::relay_decode_xor;
use crate::sage::{
    preamble_blocks, preamble_channel_estimate, ParamEstimate, PreamblePilots, SageContext, SageOptions,
    SageTrace,
};
use crate::seed::derive_seed;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Receiver-side noise variance used when the channel is noiseless, relative
/// to the expected signal power; keeps the posterior well defined.
pub const NOISELESS_NOISE_FLOOR: f64 = 1e-9;

/// Immutable per-run state shared by every frame.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: SimConfig,
    pub code: QcLdpcCode,
    pub receivers: Vec<Receiver>,
    pub pilots: PreamblePilots,
    /// Codewords per terminal per frame.
    pub codewords: usize,
    ctx: SageContext,
    signal_power: f64,
}

impl Setup {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let code = config.code_preset()?.build()?;
        let constellation = config.constellation()?;
        let alloc = config.allocation()?;
        let slots = config.k() * config.blocks * constellation.bits_per_symbol();
        let priors = crate::channel::pdp_variances(config.taps);
        let ctx = SageContext::new(alloc, constellation, [priors.clone(), priors], 1.0)?;
        Ok(Setup {
            receivers: config.receiver_set()?,
            pilots: PreamblePilots::comb(config.n),
            codewords: slots / code.n(),
            signal_power: expected_mac_power(config.k(), config.n),
            config: config.clone(),
            code,
            ctx,
        })
    }

    /// Information bits per terminal per frame.
    pub fn message_bits(&self) -> usize {
        self.codewords * self.code.k()
    }

    /// Channel noise variance of a sweep point (zero for infinite SNR).
    pub fn noise_var(&self, snr_db: f64) -> f64 {
        noise_variance(snr_db, self.signal_power)
    }

    /// Receiver context at a sweep point.
    pub fn context(&self, snr_db: f64) -> SageContext {
        let var = self.noise_var(snr_db).max(NOISELESS_NOISE_FLOOR * self.signal_power);
        self.ctx.with_noise_var(var)
    }

    pub fn sage_options(&self, iterations: usize) -> SageOptions {
        SageOptions {
            iterations,
            update_cfo: true,
            cfo_rule: self.config.cfo_rule(),
            bootstrap: self.config.bootstrap(),
        }
    }

    /// Seed of frame `frame`. Frames are shared by every sweep point so that
    /// points differ only in the swept parameter.
    pub fn frame_seed(&self, frame: u64) -> u64 {
        derive_seed(self.config.seed, &[frame])
    }
}

/// What should be kept besides the error counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrameOptions {
    pub keep_traces: bool,
    pub keep_bits: bool,
}

/// Outcome of one receiver on one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub receiver: Receiver,
    pub bits: u64,
    pub bit_errors: u64,
    pub frame_error: bool,
    pub codewords: u64,
    pub unconverged: u64,
    pub decoder_iterations: u64,
    /// Subcarriers whose XOR LLR hit the clamp from a zero-probability set.
    pub degenerate_llrs: u64,
    /// Operations spent inside SAGE (proposed receiver only).
    pub sage_ops: OpCounts,
    /// Per-block SAGE traces when requested.
    pub traces: Vec<SageTrace>,
    /// Per-block final estimates when traces are requested.
    pub estimates: Vec<ParamEstimate>,
    /// `(true XOR bit, decoded XOR bit)` per message bit when requested.
    pub bit_log: Vec<(u8, u8)>,
}

impl TrialResult {
    fn new(receiver: Receiver) -> Self {
        TrialResult {
            receiver,
            bits: 0,
            bit_errors: 0,
            frame_error: false,
            codewords: 0,
            unconverged: 0,
            decoder_iterations: 0,
            degenerate_llrs: 0,
            sage_ops: OpCounts::default(),
            traces: Vec::new(),
            estimates: Vec::new(),
            bit_log: Vec::new(),
        }
    }
}

/// Everything random about a frame, independent of the receivers.
#[derive(Debug, Clone)]
pub struct FrameRealization {
    pub terminals: [TerminalFrame; 2],
    pub taps: [Vec<Complex64>; 2],
    /// Unit-variance noise for the preamble (index 0) and each payload block.
    pub unit_noise: Vec<Vec<Complex64>>,
}

impl FrameRealization {
    pub fn draw(setup: &Setup, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = &setup.config;
        let constellation = setup.ctx.constellation.clone();
        let terminal = |rng: &mut ChaCha8Rng| -> Result<TerminalFrame> {
            let source_bits: Vec<u8> = (0..setup.message_bits()).map(|_| rng.gen_range(0..2u8)).collect();
            let mut coded_bits = Vec::with_capacity(setup.codewords * setup.code.n());
            for m in source_bits.chunks(setup.code.k()) {
                coded_bits.extend(setup.code.encode(m)?);
            }
            let bps = constellation.bits_per_symbol();
            let block_symbols = segment_into_blocks(&coded_bits, cfg.k() * bps, cfg.blocks)?
                .iter()
                .map(|seg| constellation.map(seg))
                .collect::<Result<_>>()?;
            Ok(TerminalFrame {
                source_bits,
                coded_bits,
                block_symbols,
            })
        };
        let terminals = [terminal(&mut rng)?, terminal(&mut rng)?];
        let taps = [
            draw_cir(cfg.taps, &mut rng)?.taps,
            draw_cir(cfg.taps, &mut rng)?.taps,
        ];
        let unit_noise = (0..=cfg.blocks)
            .map(|_| (0..cfg.n).map(|_| complex_gaussian(&mut rng, 1.0)).collect())
            .collect();
        Ok(FrameRealization {
            terminals,
            taps,
            unit_noise,
        })
    }

    /// True XOR of the two terminals' messages.
    pub fn xor_message(&self) -> Vec<u8> {
        self.terminals[0]
            .source_bits
            .iter()
            .zip(&self.terminals[1].source_bits)
            .map(|(a, b)| a ^ b)
            .collect()
    }
}

fn observe(
    setup: &Setup,
    x: [&ComplexBlock; 2],
    taps: &[Vec<Complex64>; 2],
    eps: [f64; 2],
    unit_noise: &[Complex64],
    noise_std: f64,
) -> Result<ComplexBlock> {
    let mut y = mac_signal_model(&setup.ctx.dft, x, [&taps[0], &taps[1]], eps)?;
    if noise_std > 0.0 {
        for (s, w) in y.samples_mut().iter_mut().zip(unit_noise) {
            *s += w * noise_std;
        }
    }
    Ok(y)
}

/// Simulates one frame at `point` for `receivers`.
pub fn run_frame(
    setup: &Setup,
    point: &SweepPoint,
    receivers: &[Receiver],
    seed: u64,
    options: FrameOptions,
) -> Result<Vec<TrialResult>> {
    let frame = FrameRealization::draw(setup, seed)?;
    run_frame_on(setup, point, receivers, &frame, options)
}

/// Runs the receivers on a given realization.
pub fn run_frame_on(
    setup: &Setup,
    point: &SweepPoint,
    receivers: &[Receiver],
    frame: &FrameRealization,
    options: FrameOptions,
) -> Result<Vec<TrialResult>> {
    let cfg = &setup.config;
    let ctx = setup.context(point.snr_db);
    let noise_std = setup.noise_var(point.snr_db).sqrt();
    let schedule = point.cfo.schedule;
    let alloc = &ctx.alloc;
    let taps = &frame.taps;
    let l = [cfg.taps, cfg.taps];

    let pre = preamble_blocks(&setup.pilots);
    let eps0 = schedule.at(0)?;
    let y_pre = observe(setup, [&pre[0], &pre[1]], taps, eps0, &frame.unit_noise[0], noise_std)?;
    let h_pre = preamble_channel_estimate(&ctx.dft, &y_pre, &setup.pilots, l)?;
    let h_mean = if receivers.contains(&Receiver::MeanCfo) {
        let y = mean_compensate(&y_pre, eps0)?;
        Some(preamble_channel_estimate(&ctx.dft, &y, &setup.pilots, l)?)
    } else {
        None
    };

    let mut results: Vec<TrialResult> = receivers.iter().map(|&r| TrialResult::new(r)).collect();
    let mut llrs: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.k() * cfg.blocks); receivers.len()];
    let mut estimate = ParamEstimate::initial([0.0, 0.0], h_pre.clone(), cfg.k());
    let base_options = setup.sage_options(point.iterations);
    let first_block_only = match cfg.cfo_update {
        CfoUpdateMode::Auto => schedule.mode == CfoMode::Constant,
        CfoUpdateMode::EveryBlock => false,
        CfoUpdateMode::FirstBlockOnly => true,
    };

    for b in 1..=cfg.blocks {
        let ctx_err = |e: Error| e.context(format!("payload block {b}"));
        let eps = schedule.at(b)?;
        let x = [
            alloc.allocate(&frame.terminals[0].block_symbols[b - 1])?,
            alloc.allocate(&frame.terminals[1].block_symbols[b - 1])?,
        ];
        let w = &frame.unit_noise[b];
        let y = observe(setup, [&x[0], &x[1]], taps, eps, w, noise_std)?;
        for (slot, res) in results.iter_mut().enumerate() {
            let mapped: MappedBlock = match res.receiver {
                Receiver::Proposed => {
                    let mut opts = base_options;
                    opts.update_cfo = b == 1 || !first_block_only;
                    let truth = options.keep_traces.then_some(taps);
                    let (out, ops) =
                        counters::measure(|| proposed_receiver(&ctx, &y, &estimate, &opts, truth));
                    let (mapped, est, trace) = out.map_err(ctx_err)?;
                    res.sage_ops += ops;
                    if options.keep_traces {
                        res.traces.push(trace);
                        res.estimates.push(est.clone());
                    }
                    estimate = est;
                    mapped
                }
                Receiver::SyncGenie => {
                    let y_sync = observe(setup, [&x[0], &x[1]], taps, [0.0, 0.0], w, noise_std)?;
                    sync_genie_receiver(&ctx, &y_sync, [&taps[0], &taps[1]])?
                }
                Receiver::MeanCfo => {
                    let h = h_mean.as_ref().expect("mean-receiver channels estimated");
                    mean_cfo_receiver(&ctx, &y, eps, [&h[0], &h[1]])?
                }
                Receiver::NoCompensation => no_compensation_receiver(&ctx, &y, [&h_pre[0], &h_pre[1]])?,
            };
            let out = mapped.xor_llrs(&ctx).map_err(ctx_err)?;
            res.degenerate_llrs += out.degenerate as u64;
            llrs[slot].extend(out.llrs);
        }
    }

    let truth = frame.xor_message();
    let (n, k) = (setup.code.n(), setup.code.k());
    for (res, llr) in results.iter_mut().zip(&llrs) {
        for c in 0..setup.codewords {
            let dec = relay_decode_xor(&setup.code, &llr[c * n..(c + 1) * n], cfg.decoder_iters)?;
            let want = &truth[c * k..(c + 1) * k];
            res.codewords += 1;
            res.decoder_iterations += dec.iterations as u64;
            res.unconverged += u64::from(!dec.converged);
            res.bits += k as u64;
            res.bit_errors += want.iter().zip(&dec.message).filter(|(a, b)| a != b).count() as u64;
            if options.keep_bits {
                res.bit_log.extend(want.iter().copied().zip(dec.message.iter().copied()));
            }
        }
        res.frame_error = res.bit_errors > 0;
    }
    Ok(results)
}
