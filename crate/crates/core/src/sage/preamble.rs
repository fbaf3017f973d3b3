//! Training block for the initial channel estimates.
//!
//! Terminal 1 sends known BPSK pilots on the even subcarriers, terminal 2 on
//! the odd ones, so the two combs are orthogonal in the absence of CFO and
//! each channel is a separate least-squares fit.

use crate::error::check_len;
use crate::linalg::{solve_hermitian, ComplexBlock, Dft};
use crate::seed::splitmix64;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Known pilot values of both terminals on their combs.
#[derive(Debug, Clone, PartialEq)]
pub struct PreamblePilots {
    n: usize,
    /// `(subcarrier, pilot)` pairs for each terminal.
    combs: [Vec<(usize, Complex64)>; 2],
}

impl PreamblePilots {
    /// Fixed pseudo-random ±1 pilots; terminal 1 on even, terminal 2 on odd
    /// subcarriers.
    pub fn comb(n: usize) -> Self {
        let pilot = |k: usize| {
            let sign = if splitmix64(k as u64 ^ 0x5052_4541_4d42_4c45) & 1 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign, 0.0)
        };
        let comb = |parity: usize| (0..n).filter(|k| k % 2 == parity).map(|k| (k, pilot(k))).collect();
        PreamblePilots {
            n,
            combs: [comb(0), comb(1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn comb_of(&self, terminal: usize) -> &[(usize, Complex64)] {
        &self.combs[terminal]
    }
}

/// Frequency-domain training blocks `x_1`, `x_2` (zeros off each comb).
pub fn preamble_blocks(pilots: &PreamblePilots) -> [ComplexBlock; 2] {
    let block = |i: usize| {
        let mut x = vec![Complex64::new(0.0, 0.0); pilots.n];
        for &(k, p) in &pilots.combs[i] {
            x[k] = p;
        }
        ComplexBlock::frequency(x)
    };
    [block(0), block(1)]
}

/// Least-squares channel fit of `taps[i]` taps for each terminal from its
/// pilot comb in the received training block (time domain).
pub fn preamble_channel_estimate(
    dft: &Dft,
    received: &ComplexBlock,
    pilots: &PreamblePilots,
    taps: [usize; 2],
) -> Result<[Vec<Complex64>; 2]> {
    check_len(dft.len(), received.len())?;
    check_len(dft.len(), pilots.n)?;
    let yf = dft.apply_fh(received)?;
    let n = dft.len() as f64;
    let fit = |i: usize| -> Result<Vec<Complex64>> {
        let comb = &pilots.combs[i];
        let l = taps[i];
        if comb.len() < 2 * l {
            return Err(Error::Underdetermined {
                available: comb.len(),
                unknowns: 2 * l,
            });
        }
        let phasor = |k: usize, d: isize| Complex64::from_polar(1.0, 2.0 * PI * (k as f64) * d as f64 / n);
        let mut normal = vec![Complex64::new(0.0, 0.0); l * l];
        let mut rhs = vec![Complex64::new(0.0, 0.0); l];
        for &(k, p) in comb {
            let obs = p.conj() * yf.samples()[k] / p.norm_sqr();
            for a in 0..l {
                rhs[a] += obs * phasor(k, a as isize);
                for b in 0..l {
                    normal[a * l + b] += phasor(k, a as isize - b as isize);
                }
            }
        }
        solve_hermitian(&normal, &rhs)
    };
    Ok([fit(0)?, fit(1)?])
}
