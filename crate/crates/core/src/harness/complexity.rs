//! Measured cost of the SAGE group update against the closed-form counts.

use crate::channel::{complex_gaussian, draw_cir, pdp_variances};
use crate::counters::{self, OpCounts};
use crate::linalg::ComplexBlock;
use crate::ofdm::{Constellation, SubcarrierAllocation};
use crate::sage::{update_group, ParamEstimate, SageContext, SageOptions};
use crate::seed::derive_seed;
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Closed-form complex operation counts of one group update:
/// `6N log2 N + 2N + K` additions and `3N log2 N + 5N + K` multiplications.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaCounts {
    pub adds: u64,
    pub muls: u64,
}

impl FormulaCounts {
    pub fn new(n: usize, k: usize) -> Self {
        let (n, k) = (n as u64, k as u64);
        let log2 = n.trailing_zeros() as u64;
        FormulaCounts {
            adds: 6 * n * log2 + 2 * n + k,
            muls: 3 * n * log2 + 5 * n + k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRow {
    pub n: usize,
    pub k: usize,
    pub taps: usize,
    /// One terminal-group update (E-step, channel, CFO, symbols).
    pub group: OpCounts,
    /// Additions spent inside FFT passes of one group update.
    pub fft_adds: u64,
    pub formula: FormulaCounts,
}

impl ComplexityRow {
    /// Full SAGE iteration (both groups).
    pub fn iteration(&self) -> OpCounts {
        self.group + self.group
    }

    pub fn add_ratio(&self) -> f64 {
        self.group.adds as f64 / self.formula.adds as f64
    }

    pub fn mul_ratio(&self) -> f64 {
        self.group.muls as f64 / self.formula.muls as f64
    }
}

/// Counts one group update on a random full-allocation BPSK instance for
/// each block length in `ns`.
pub fn complexity_report(ns: &[usize], taps: usize, seed: u64) -> Result<Vec<ComplexityRow>> {
    ns.iter()
        .map(|&n| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[n as u64]));
            let alloc = SubcarrierAllocation::full(n);
            let priors = pdp_variances(taps);
            let ctx = SageContext::new(alloc, Constellation::bpsk(), [priors.clone(), priors], 0.05)?;
            let h = [draw_cir(taps, &mut rng)?.taps, draw_cir(taps, &mut rng)?.taps];
            let mut est = ParamEstimate::initial([0.03, -0.02], h, n);
            for s in est.symbols.iter_mut() {
                s.iter_mut()
                    .for_each(|x| *x = Constellation::bpsk().points()[rng.gen_range(0..2)]);
            }
            let y = ComplexBlock::time((0..n).map(|_| complex_gaussian(&mut rng, 1.0)).collect());
            let other: Vec<_> = (0..n).map(|_| complex_gaussian(&mut rng, 0.5)).collect();
            let (out, group) = counters::measure(|| {
                update_group(&ctx, y.samples(), &other, &mut est, 0, &SageOptions::default())
            });
            out?;
            let log2 = n.trailing_zeros() as u64;
            Ok(ComplexityRow {
                n,
                k: n,
                taps,
                group,
                fft_adds: group.ffts * n as u64 * log2,
                formula: FormulaCounts::new(n, n),
            })
        })
        .collect()
}
