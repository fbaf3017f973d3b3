//! SAGE joint estimation of CFOs, channels and symbols at the relay.
//!
//! The parameters split into one group per terminal, `θ_i = (ε_i, h_i, X_i)`.
//! A group is updated against its hidden signal (the relay observation minus
//! the other terminal's current reconstruction, all noise attributed to
//! terminal `i`) in the order channel (MMSE), CFO (Newton step), symbols
//! (nearest point). One SAGE iteration updates terminal 1 then terminal 2.

mod preamble;

pub use preamble::{preamble_blocks, preamble_channel_estimate, PreamblePilots};

use crate::counters;
use crate::error::check_len;
use crate::ici::dirichlet_gain;
use crate::linalg::{solve_hermitian, ComplexBlock, Dft, Domain, PhaseRamp};
use crate::ofdm::{terminal_signal, Constellation, SubcarrierAllocation};
use crate::{Error, Result, MAX_ABS_CFO};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Joint estimate `θ̂ = (ε̂, ĥ, X̂)` for both terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamEstimate {
    pub eps: [f64; 2],
    pub taps: [Vec<Complex64>; 2],
    /// Symbol decisions on the `K` allocated subcarriers.
    pub symbols: [Vec<Complex64>; 2],
    pub iteration: usize,
}

impl ParamEstimate {
    /// Estimate with the given CFOs and channels and no symbol decisions yet
    /// (all-zero symbol vectors of length `k`).
    pub fn initial(eps: [f64; 2], taps: [Vec<Complex64>; 2], k: usize) -> Self {
        let zeros = vec![Complex64::new(0.0, 0.0); k];
        ParamEstimate {
            eps,
            taps,
            symbols: [zeros.clone(), zeros],
            iteration: 0,
        }
    }
}

/// Receiver-side constants shared by every block of a run.
#[derive(Debug, Clone)]
pub struct SageContext {
    pub dft: Dft,
    pub alloc: SubcarrierAllocation,
    pub constellation: Constellation,
    /// Prior tap variances (diagonal of `R_i`) per terminal.
    pub priors: [Vec<f64>; 2],
    /// Noise variance assumed known at the relay.
    pub noise_var: f64,
    // D^H A A^T D for unit-modulus constellations, one per terminal.
    unit_gram: [Option<Vec<Complex64>>; 2],
}

impl SageContext {
    pub fn new(
        alloc: SubcarrierAllocation,
        constellation: Constellation,
        priors: [Vec<f64>; 2],
        noise_var: f64,
    ) -> Result<Self> {
        let dft = Dft::new(alloc.n())?;
        if !(noise_var >= 0.0) {
            return Err(Error::config("noise variance must be non-negative"));
        }
        for p in &priors {
            if p.is_empty() || p.len() > alloc.n() || p.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::config("prior tap variances must be positive, 1..=N taps"));
            }
        }
        let unit_gram = if constellation.is_unit_modulus() {
            let ones = vec![1.0; alloc.k()];
            [
                Some(gram(&alloc, &ones, priors[0].len())),
                Some(gram(&alloc, &ones, priors[1].len())),
            ]
        } else {
            [None, None]
        };
        Ok(SageContext {
            dft,
            alloc,
            constellation,
            priors,
            noise_var,
            unit_gram,
        })
    }

    pub fn with_noise_var(&self, noise_var: f64) -> Self {
        SageContext {
            noise_var,
            ..self.clone()
        }
    }

    pub fn n(&self) -> usize {
        self.dft.len()
    }

    /// Frequency-domain block `A X̂ D ĥ` (zeros off the allocation).
    fn allocated_product(&self, symbols: &[Complex64], resp: &[Complex64]) -> Vec<Complex64> {
        let mut s = vec![Complex64::new(0.0, 0.0); self.n()];
        for (&q, &x) in self.alloc.indices().iter().zip(symbols) {
            s[q] = x * resp[q];
        }
        counters::record(0, self.alloc.k() as u64);
        s
    }

    /// `E(ε) F A X D h` for one terminal.
    fn contribution(&self, eps: f64, symbols: &[Complex64], taps: &[Complex64]) -> Result<Vec<Complex64>> {
        let resp = self.dft.apply_d_cols(taps)?;
        let x = self.alloc.allocate(symbols)?;
        let ramp = PhaseRamp::new(eps, self.n())?;
        Ok(terminal_signal(&self.dft, x.samples(), resp.samples(), &ramp))
    }
}

/// `G(l, l') = Σ_k w_k e^{j2π q_k (l - l')/N}`, i.e. `D^H A W A^T D` restricted
/// to the first `taps` columns.
fn gram(alloc: &SubcarrierAllocation, weights: &[f64], taps: usize) -> Vec<Complex64> {
    let n = alloc.n() as f64;
    let mut lag = vec![Complex64::new(0.0, 0.0); taps];
    for (d, slot) in lag.iter_mut().enumerate() {
        *slot = alloc
            .indices()
            .iter()
            .zip(weights)
            .map(|(&q, &w)| Complex64::from_polar(w, 2.0 * PI * (q * d) as f64 / n))
            .sum();
    }
    let mut g = vec![Complex64::new(0.0, 0.0); taps * taps];
    for l in 0..taps {
        for m in 0..taps {
            g[l * taps + m] = if l >= m { lag[l - m] } else { lag[m - l].conj() };
        }
    }
    g
}

/// Hidden signal of terminal `i`: `ŷ_i = y_R - E(ε̂_ī) F X̂_ī D ĥ_ī`.
pub fn hidden_signal(
    ctx: &SageContext,
    y: &ComplexBlock,
    estimate: &ParamEstimate,
    terminal: usize,
) -> Result<ComplexBlock> {
    check_len(ctx.n(), y.len())?;
    let other = 1 - terminal;
    let t = ctx.contribution(
        estimate.eps[other],
        &estimate.symbols[other],
        &estimate.taps[other],
    )?;
    Ok(ComplexBlock::time(subtract(y.samples(), &t)))
}

fn subtract(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    counters::record(a.len() as u64, 0);
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// MMSE channel update
/// `ĥ = (σ² R^{-1} + D^H X̂^H X̂ D)^{-1} D^H X̂^H F^H E^H(ε̂) ŷ`.
pub fn update_channel_mmse(
    ctx: &SageContext,
    terminal: usize,
    hidden: &ComplexBlock,
    eps: f64,
    symbols: &[Complex64],
) -> Result<Vec<Complex64>> {
    check_len(ctx.n(), hidden.len())?;
    check_len(ctx.alloc.k(), symbols.len())?;
    let prior = &ctx.priors[terminal];
    let taps = prior.len();

    let mut r = hidden.samples().to_vec();
    PhaseRamp::new(eps, ctx.n())?.apply_conj_in_place(&mut r);
    ctx.dft.fh_in_place(&mut r);
    let mut g = vec![Complex64::new(0.0, 0.0); ctx.n()];
    for (&q, x) in ctx.alloc.indices().iter().zip(symbols) {
        g[q] = x.conj() * r[q];
    }
    counters::record(0, ctx.alloc.k() as u64);
    ctx.dft.inverse_in_place(&mut g);
    g.truncate(taps);

    let mut normal = match &ctx.unit_gram[terminal] {
        Some(gm) if symbols.iter().all(|x| x.norm_sqr() == 1.0) => gm.clone(),
        _ => {
            let w: Vec<f64> = symbols.iter().map(|x| x.norm_sqr()).collect();
            gram(&ctx.alloc, &w, taps)
        }
    };
    for (l, v) in prior.iter().enumerate() {
        normal[l * taps + l] += ctx.noise_var / v;
    }
    solve_hermitian(&normal, &g)
}

/// `Ω = F A X̂ D ĥ`, the noiseless time-domain signal of one terminal before
/// its CFO ramp. Returns `Ω` and `D ĥ`.
pub fn omega(
    ctx: &SageContext,
    symbols: &[Complex64],
    taps: &[Complex64],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let resp = ctx.dft.apply_d_cols(taps)?.into_samples();
    let mut w = ctx.allocated_product(symbols, &resp);
    ctx.dft.f_in_place(&mut w);
    Ok((w, resp))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfoStatus {
    Accepted,
    /// Curvature below the floor; estimate kept.
    Degenerate,
    /// Step would leave (-1/2, 1/2); estimate kept.
    OutOfRange,
    /// CFO updates disabled for this block.
    Skipped,
}

/// How the CFO step treats the channel estimate's common phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfoRule {
    /// Newton step on `ε` alone with `ĥ` held fixed.
    Plain,
    /// Joint Newton step on `ε` and a common phase rotation of `ĥ`.
    ///
    /// The MMSE channel update absorbs the mean phase of the CFO ramp into
    /// `ĥ`, which leaves the plain step recovering only about a quarter of
    /// the remaining offset per iteration. Solving for the common phase
    /// alongside `ε` removes that coupling.
    PhaseAware,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfoUpdate {
    pub epsilon: f64,
    /// Common phase (radians) to apply to `ĥ`; zero for the plain rule.
    pub phase: f64,
    pub status: CfoStatus,
}

// Moments of z_n = ŷ*(n) Ω(n) e^{j2πε̂n/N}: Σ n^p Re z_n and Σ n^p Im z_n.
struct CfoMoments {
    re: [f64; 3],
    im: [f64; 2],
    scale: f64,
}

fn cfo_moments(hidden: &[Complex64], omega: &[Complex64], eps: f64) -> Result<CfoMoments> {
    check_len(hidden.len(), omega.len())?;
    let n = hidden.len();
    let ramp = PhaseRamp::new(eps, n)?;
    let mut m = CfoMoments {
        re: [0.0; 3],
        im: [0.0; 2],
        scale: 0.0,
    };
    for (idx, ((y, w), p)) in hidden.iter().zip(omega).zip(ramp.entries()).enumerate() {
        let z = y.conj() * w * p;
        let t = idx as f64;
        m.re[0] += z.re;
        m.re[1] += t * z.re;
        m.re[2] += t * t * z.re;
        m.im[0] += z.im;
        m.im[1] += t * z.im;
        m.scale += t * t * y.norm() * w.norm();
    }
    counters::record(2 * n as u64, 2 * n as u64);
    Ok(m)
}

fn finish_step(eps: f64, step: f64, phase: f64) -> CfoUpdate {
    let next = eps + step;
    if !next.is_finite() || next.abs() >= MAX_ABS_CFO {
        CfoUpdate {
            epsilon: eps,
            phase: 0.0,
            status: CfoStatus::OutOfRange,
        }
    } else {
        CfoUpdate {
            epsilon: next,
            phase,
            status: CfoStatus::Accepted,
        }
    }
}

const CURVATURE_FLOOR: f64 = 1e-9;

/// Second-order Taylor (Newton) step on the CFO objective
/// `Re{ŷ^H E(ε) Ω}` around `ε̂`:
///
/// `ε̂' = ε̂ - N/(2π) Σ n Im{z_n} / Σ n² Re{z_n}`,
/// `z_n = ŷ*(n) Ω(n) e^{j2πε̂n/N}`.
pub fn update_cfo(hidden: &[Complex64], eps: f64, omega: &[Complex64]) -> Result<CfoUpdate> {
    let m = cfo_moments(hidden, omega, eps)?;
    let n = hidden.len() as f64;
    if m.re[2].abs() < CURVATURE_FLOOR * m.scale || m.scale == 0.0 {
        return Ok(CfoUpdate {
            epsilon: eps,
            phase: 0.0,
            status: CfoStatus::Degenerate,
        });
    }
    Ok(finish_step(eps, -n / (2.0 * PI) * m.im[1] / m.re[2], 0.0))
}

/// Newton step on `(ε, φ)` for the objective `Re{e^{jφ} ŷ^H E(ε) Ω}`; see
/// [`CfoRule::PhaseAware`].
pub fn update_cfo_phase_aware(
    hidden: &[Complex64],
    eps: f64,
    omega: &[Complex64],
) -> Result<CfoUpdate> {
    let m = cfo_moments(hidden, omega, eps)?;
    let n = hidden.len() as f64;
    let a = 2.0 * PI / n;
    let det = m.re[2] * m.re[0] - m.re[1] * m.re[1];
    let scale = m.scale * m.re[0].abs().max(f64::MIN_POSITIVE);
    if m.re[0] <= 0.0 || m.re[2] <= 0.0 || det < CURVATURE_FLOOR * scale {
        return Ok(CfoUpdate {
            epsilon: eps,
            phase: 0.0,
            status: CfoStatus::Degenerate,
        });
    }
    let step = -(m.im[1] * m.re[0] - m.re[1] * m.im[0]) / (a * det);
    let phase = -(m.im[0] * m.re[2] - m.re[1] * m.im[1]) / det;
    Ok(finish_step(eps, step, phase))
}

/// Result of a symbol-decision pass.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDecision {
    pub symbols: Vec<Complex64>,
    /// Subcarriers where `Ĥ(k)` vanished and the tie-break decided.
    pub deep_fades: usize,
}

/// Nearest-point decision `X̂(k) = argmin_a |Ŷ(k) - a Ĥ(k)|²` with
/// `Ŷ = A^T F^H E^H(ε̂) ŷ`, `Ĥ = D ĥ`; ties go to the lowest point index.
pub fn update_symbols(
    ctx: &SageContext,
    hidden: &ComplexBlock,
    eps: f64,
    taps: &[Complex64],
) -> Result<SymbolDecision> {
    let resp = ctx.dft.apply_d_cols(taps)?.into_samples();
    decide_symbols(ctx, hidden.samples(), eps, &resp)
}

fn decide_symbols(
    ctx: &SageContext,
    hidden: &[Complex64],
    eps: f64,
    resp: &[Complex64],
) -> Result<SymbolDecision> {
    check_len(ctx.n(), hidden.len())?;
    let mut yf = hidden.to_vec();
    PhaseRamp::new(eps, ctx.n())?.apply_conj_in_place(&mut yf);
    ctx.dft.fh_in_place(&mut yf);
    let points = ctx.constellation.points();
    let mut deep_fades = 0;
    let symbols = ctx
        .alloc
        .indices()
        .iter()
        .map(|&q| {
            if resp[q].norm_sqr() < 1e-24 {
                deep_fades += 1;
            }
            nearest(points, yf[q], resp[q])
        })
        .collect();
    let ops = (ctx.alloc.k() * points.len()) as u64;
    counters::record(ops, ops);
    Ok(SymbolDecision {
        symbols,
        deep_fades,
    })
}

fn nearest(points: &[Complex64], obs: Complex64, gain: Complex64) -> Complex64 {
    let mut best = points[0];
    let mut best_d = f64::INFINITY;
    for &p in points {
        let d = (obs - p * gain).norm_sqr();
        if d < best_d {
            best_d = d;
            best = p;
        }
    }
    best
}

/// Joint per-subcarrier decision of both terminals' symbols,
/// `argmin_{a,b} |Y(k) - a Λ̂_1 Ĥ_1(k) - b Λ̂_2 Ĥ_2(k)|²`, on the raw block.
pub fn joint_symbol_decisions(
    ctx: &SageContext,
    y: &ComplexBlock,
    eps: [f64; 2],
    taps: [&[Complex64]; 2],
) -> Result<[Vec<Complex64>; 2]> {
    check_len(ctx.n(), y.len())?;
    let mut yf = y.samples().to_vec();
    ctx.dft.fh_in_place(&mut yf);
    let gains = [
        gains_on_allocation(ctx, eps[0], taps[0])?,
        gains_on_allocation(ctx, eps[1], taps[1])?,
    ];
    let points = ctx.constellation.points();
    let mut out = [Vec::with_capacity(ctx.alloc.k()), Vec::with_capacity(ctx.alloc.k())];
    for (k, &q) in ctx.alloc.indices().iter().enumerate() {
        let mut best = (points[0], points[0]);
        let mut best_d = f64::INFINITY;
        for &a in points {
            for &b in points {
                let d = (yf[q] - a * gains[0][k] - b * gains[1][k]).norm_sqr();
                if d < best_d {
                    best_d = d;
                    best = (a, b);
                }
            }
        }
        out[0].push(best.0);
        out[1].push(best.1);
    }
    Ok(out)
}

/// `Γ = A^T Λ(ε) D h`, the per-subcarrier gain of one terminal once ICI is
/// removed.
pub fn gains_on_allocation(ctx: &SageContext, eps: f64, taps: &[Complex64]) -> Result<Vec<Complex64>> {
    let lambda = dirichlet_gain(eps, ctx.n());
    let resp = ctx.dft.apply_d_cols(taps)?;
    counters::record(0, ctx.alloc.k() as u64);
    Ok(ctx
        .alloc
        .indices()
        .iter()
        .map(|&q| lambda * resp.samples()[q])
        .collect())
}

/// Log-likelihood (up to a constant)
/// `-‖y - E(ε1)FX1Dh1 - E(ε2)FX2Dh2‖² / σ²`.
pub fn log_likelihood(ctx: &SageContext, y: &ComplexBlock, estimate: &ParamEstimate) -> Result<f64> {
    if !(ctx.noise_var > 0.0) {
        return Err(Error::config("log-likelihood needs a positive noise variance"));
    }
    Ok(-residual_energy(ctx, y, estimate)? / ctx.noise_var)
}

/// `‖y - E(ε1)FX1Dh1 - E(ε2)FX2Dh2‖²`.
pub fn residual_energy(ctx: &SageContext, y: &ComplexBlock, estimate: &ParamEstimate) -> Result<f64> {
    check_len(ctx.n(), y.len())?;
    let t0 = ctx.contribution(estimate.eps[0], &estimate.symbols[0], &estimate.taps[0])?;
    let t1 = ctx.contribution(estimate.eps[1], &estimate.symbols[1], &estimate.taps[1])?;
    Ok(y.samples()
        .iter()
        .zip(t0.iter().zip(&t1))
        .map(|(y, (a, b))| (y - a - b).norm_sqr())
        .sum())
}

/// How `X̂^{[0]}` is obtained before the first iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolBootstrap {
    /// One nearest-point pass per terminal on the raw observation, treating
    /// the other terminal as noise.
    PerTerminal,
    /// Joint nearest-pair decision on the raw observation.
    JointPair,
    /// Keep the symbols supplied in the initial estimate.
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SageOptions {
    pub iterations: usize,
    pub update_cfo: bool,
    pub cfo_rule: CfoRule,
    pub bootstrap: SymbolBootstrap,
}

impl Default for SageOptions {
    fn default() -> Self {
        SageOptions {
            iterations: 2,
            update_cfo: true,
            cfo_rule: CfoRule::PhaseAware,
            bootstrap: SymbolBootstrap::JointPair,
        }
    }
}

/// State after iteration `iteration` (0 = after the symbol bootstrap).
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub eps: [f64; 2],
    pub residual_energy: f64,
    /// `-residual / σ²`; `-residual` when the noise variance is zero.
    pub log_likelihood: f64,
    /// `‖ĥ_i - h_i‖²` when the true channels are supplied.
    pub channel_mse: Option<[f64; 2]>,
    pub symbol_changes: [usize; 2],
    pub cfo_status: [CfoStatus; 2],
    pub deep_fades: [usize; 2],
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SageTrace {
    pub records: Vec<IterationRecord>,
}

fn channel_mse(est: &ParamEstimate, truth: Option<&[Vec<Complex64>; 2]>) -> Option<[f64; 2]> {
    truth.map(|t| {
        let f = |i: usize| {
            est.taps[i]
                .iter()
                .zip(&t[i])
                .map(|(a, b)| (a - b).norm_sqr())
                .sum()
        };
        [f(0), f(1)]
    })
}

fn record(
    ctx: &SageContext,
    y: &ComplexBlock,
    est: &ParamEstimate,
    truth: Option<&[Vec<Complex64>; 2]>,
    symbol_changes: [usize; 2],
    cfo_status: [CfoStatus; 2],
    deep_fades: [usize; 2],
) -> Result<IterationRecord> {
    let residual = counters::uncounted(|| residual_energy(ctx, y, est))?;
    let log_likelihood = if ctx.noise_var > 0.0 {
        -residual / ctx.noise_var
    } else {
        -residual
    };
    Ok(IterationRecord {
        iteration: est.iteration,
        eps: est.eps,
        residual_energy: residual,
        log_likelihood,
        channel_mse: channel_mse(est, truth),
        symbol_changes,
        cfo_status,
        deep_fades,
    })
}

/// Bootstraps `X̂^{[0]}` per `options.bootstrap`.
pub fn bootstrap_symbols(
    ctx: &SageContext,
    y: &ComplexBlock,
    estimate: &mut ParamEstimate,
    bootstrap: SymbolBootstrap,
) -> Result<()> {
    match bootstrap {
        SymbolBootstrap::PerTerminal => {
            for i in 0..2 {
                estimate.symbols[i] = update_symbols(ctx, y, estimate.eps[i], &estimate.taps[i])?.symbols;
            }
        }
        SymbolBootstrap::JointPair => {
            estimate.symbols = joint_symbol_decisions(
                ctx,
                y,
                estimate.eps,
                [&estimate.taps[0], &estimate.taps[1]],
            )?;
        }
        SymbolBootstrap::Keep => {}
    }
    Ok(())
}

/// One group update of terminal `i` given the cached time-domain
/// contribution of the other terminal. Returns the new contribution of `i`.
pub(crate) fn update_group(
    ctx: &SageContext,
    y: &[Complex64],
    other_contribution: &[Complex64],
    est: &mut ParamEstimate,
    i: usize,
    options: &SageOptions,
) -> Result<GroupOutcome> {
    let hidden = ComplexBlock::time(subtract(y, other_contribution));
    est.taps[i] = update_channel_mmse(ctx, i, &hidden, est.eps[i], &est.symbols[i])?;

    let (om, mut resp) = omega(ctx, &est.symbols[i], &est.taps[i])?;
    let status = if options.update_cfo {
        let upd = match options.cfo_rule {
            CfoRule::Plain => update_cfo(hidden.samples(), est.eps[i], &om)?,
            CfoRule::PhaseAware => update_cfo_phase_aware(hidden.samples(), est.eps[i], &om)?,
        };
        est.eps[i] = upd.epsilon;
        if upd.phase != 0.0 {
            let rot = Complex64::from_polar(1.0, upd.phase);
            est.taps[i].iter_mut().for_each(|h| *h *= rot);
            for &q in ctx.alloc.indices() {
                resp[q] *= rot;
            }
            counters::record(0, ctx.alloc.k() as u64);
        }
        upd.status
    } else {
        CfoStatus::Skipped
    };

    let dec = decide_symbols(ctx, hidden.samples(), est.eps[i], &resp)?;
    let changes = dec
        .symbols
        .iter()
        .zip(&est.symbols[i])
        .filter(|(a, b)| a != b)
        .count();
    est.symbols[i] = dec.symbols;

    let mut t = ctx.allocated_product(&est.symbols[i], &resp);
    ctx.dft.f_in_place(&mut t);
    PhaseRamp::new(est.eps[i], ctx.n())?.apply_in_place(&mut t);
    Ok(GroupOutcome {
        contribution: t,
        changes,
        status,
        deep_fades: dec.deep_fades,
    })
}

pub(crate) struct GroupOutcome {
    pub contribution: Vec<Complex64>,
    pub changes: usize,
    pub status: CfoStatus,
    pub deep_fades: usize,
}

/// Runs `options.iterations` SAGE iterations on one received block.
///
/// `init` supplies `ε̂^{[0]}` and `ĥ^{[0]}`; its symbols are replaced by the
/// bootstrap unless `SymbolBootstrap::Keep` is selected. `truth` (true
/// channels) only feeds the trace.
pub fn run_sage(
    ctx: &SageContext,
    y: &ComplexBlock,
    init: &ParamEstimate,
    options: &SageOptions,
    truth: Option<&[Vec<Complex64>; 2]>,
) -> Result<(ParamEstimate, SageTrace)> {
    check_len(ctx.n(), y.len())?;
    if y.domain() != Domain::Time {
        return Err(Error::config("SAGE runs on the time-domain relay observation"));
    }
    let mut est = init.clone();
    est.iteration = 0;
    bootstrap_symbols(ctx, y, &mut est, options.bootstrap)?;

    let mut trace = SageTrace::default();
    trace.records.push(record(
        ctx,
        y,
        &est,
        truth,
        [0, 0],
        [CfoStatus::Skipped; 2],
        [0, 0],
    )?);

    let mut contributions = [
        ctx.contribution(est.eps[0], &est.symbols[0], &est.taps[0])?,
        ctx.contribution(est.eps[1], &est.symbols[1], &est.taps[1])?,
    ];
    for m in 1..=options.iterations {
        let mut changes = [0; 2];
        let mut status = [CfoStatus::Skipped; 2];
        let mut fades = [0; 2];
        for i in 0..2 {
            let out = update_group(ctx, y.samples(), &contributions[1 - i], &mut est, i, options)?;
            contributions[i] = out.contribution;
            changes[i] = out.changes;
            status[i] = out.status;
            fades[i] = out.deep_fades;
        }
        est.iteration = m;
        trace.records.push(record(ctx, y, &est, truth, changes, status, fades)?);
    }
    Ok((est, trace))
}
