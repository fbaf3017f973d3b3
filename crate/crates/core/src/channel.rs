//! Random channels, CFO schedules and AWGN.

use crate::error::check_cfo;
use crate::linalg::ComplexBlock;
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// Tap variances of the exponential power delay profile,
/// `E|h(l)|² ∝ e^{-l/2}`, normalized to unit total energy.
pub fn pdp_variances(taps: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..taps).map(|l| (-(l as f64) / 2.0).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// A channel impulse response together with its diagonal prior covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct Cir {
    pub taps: Vec<Complex64>,
    pub variances: Vec<f64>,
}

impl Cir {
    pub fn new(taps: Vec<Complex64>, variances: Vec<f64>) -> Result<Self> {
        if taps.len() != variances.len() || taps.is_empty() {
            return Err(Error::config("taps and prior variances must be non-empty and equal length"));
        }
        if variances.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::config("prior covariance must be positive definite"));
        }
        Ok(Cir { taps, variances })
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Circular complex Gaussian sample with `E|z|² = variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Draws independent Rayleigh taps following the exponential profile.
pub fn draw_cir<R: Rng + ?Sized>(taps: usize, rng: &mut R) -> Result<Cir> {
    if taps == 0 {
        return Err(Error::config("channel needs at least one tap"));
    }
    let variances = pdp_variances(taps);
    let taps = variances.iter().map(|&v| complex_gaussian(rng, v)).collect();
    Cir::new(taps, variances)
}

/// Expected relay signal power per time sample: two terminals, unit-power
/// symbols on `k` of `n` subcarriers, unit-energy channels.
pub fn expected_mac_power(k: usize, n: usize) -> f64 {
    2.0 * k as f64 / n as f64
}

/// Noise variance for an SNR (dB) measured as combined signal power over
/// noise power per complex sample. `+inf` dB gives zero noise.
pub fn noise_variance(snr_db: f64, signal_power: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        signal_power / 10f64.powf(snr_db / 10.0)
    }
}

/// Adds circular white Gaussian noise of the given variance.
pub fn add_noise<R: Rng + ?Sized>(v: &ComplexBlock, noise_var: f64, rng: &mut R) -> ComplexBlock {
    let mut out = v.clone();
    if noise_var > 0.0 {
        for z in out.samples_mut() {
            *z += complex_gaussian(rng, noise_var);
        }
    }
    out
}

/// Adds AWGN at `snr_db` relative to `signal_power`; returns the noisy block
/// and the noise variance used.
pub fn add_awgn<R: Rng + ?Sized>(
    v: &ComplexBlock,
    snr_db: f64,
    signal_power: f64,
    rng: &mut R,
) -> (ComplexBlock, f64) {
    let noise_var = noise_variance(snr_db, signal_power);
    (add_noise(v, noise_var, rng), noise_var)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CfoMode {
    Constant,
    /// Adds `amplitude * sin(2π n / period)` to the base offsets at block `n`.
    Sinusoidal { amplitude: f64, period: f64 },
}

/// Per-block CFO pair of the two terminals.
///
/// Block 0 is the preamble; payload blocks are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfoSchedule {
    pub mode: CfoMode,
    pub base: [f64; 2],
}

impl CfoSchedule {
    /// `ε = ξ · pairing`, e.g. pairing `[-1, 1]`.
    pub fn constant(xi: f64, pairing: [f64; 2]) -> Self {
        CfoSchedule {
            mode: CfoMode::Constant,
            base: [xi * pairing[0], xi * pairing[1]],
        }
    }

    /// `ε_i(n) = pairing_i ξ + 0.05 sin(2πn/5)`.
    pub fn sinusoidal(xi: f64, pairing: [f64; 2]) -> Self {
        CfoSchedule {
            mode: CfoMode::Sinusoidal {
                amplitude: 0.05,
                period: 5.0,
            },
            base: [xi * pairing[0], xi * pairing[1]],
        }
    }

    pub fn fixed(eps: [f64; 2]) -> Self {
        CfoSchedule {
            mode: CfoMode::Constant,
            base: eps,
        }
    }

    pub fn at(&self, block_index: usize) -> Result<[f64; 2]> {
        let drift = match self.mode {
            CfoMode::Constant => 0.0,
            CfoMode::Sinusoidal { amplitude, period } => {
                amplitude * (2.0 * PI * block_index as f64 / period).sin()
            }
        };
        let eps = [self.base[0] + drift, self.base[1] + drift];
        check_cfo(eps[0])?;
        check_cfo(eps[1])?;
        Ok(eps)
    }

    /// Validates every block of a frame.
    pub fn validate(&self, blocks: usize) -> Result<()> {
        (0..=blocks).try_for_each(|n| self.at(n).map(|_| ()))
    }
}

pub fn cfo_schedule(schedule: &CfoSchedule, block_index: usize) -> Result<[f64; 2]> {
    schedule.at(block_index)
}
