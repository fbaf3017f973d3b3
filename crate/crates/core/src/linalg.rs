//! Complex kernels for the OFDM block model.
//!
//! Conventions, for block length `N`:
//!
//! * `F` is the unitary synthesis matrix, `[F]_{p,q} = N^{-1/2} e^{+j2πpq/N}`.
//!   It maps subcarrier values to time samples; `F^H` maps back.
//! * `D` is the unnormalized analysis matrix, `[D]_{p,q} = e^{-j2πpq/N}`.
//!   `D h` is the frequency response of a channel impulse response `h`.
//! * `E(ε) = diag(e^{j2πnε/N})` is the CFO phase ramp.
//!
//! `F` and `D` are evaluated with a radix-2 FFT, so `N` must be a power of two.

use crate::counters;
use crate::error::{check_cfo, check_len};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Time,
    Frequency,
}

/// A length-N block of complex baseband samples tagged with its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBlock {
    samples: Vec<Complex64>,
    domain: Domain,
}

impl ComplexBlock {
    pub fn new(samples: Vec<Complex64>, domain: Domain) -> Self {
        ComplexBlock { samples, domain }
    }

    pub fn zeros(n: usize, domain: Domain) -> Self {
        ComplexBlock::new(vec![Complex64::new(0.0, 0.0); n], domain)
    }

    pub fn time(samples: Vec<Complex64>) -> Self {
        ComplexBlock::new(samples, Domain::Time)
    }

    pub fn frequency(samples: Vec<Complex64>) -> Self {
        ComplexBlock::new(samples, Domain::Frequency)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn expect(&self, n: usize, domain: Domain) -> Result<()> {
        check_len(n, self.len())?;
        if self.domain != domain {
            return Err(Error::config(format!(
                "expected a {domain:?}-domain block, got {:?}",
                self.domain
            )));
        }
        Ok(())
    }
}

/// Radix-2 transform plan for a fixed block length.
#[derive(Debug, Clone)]
pub struct Dft {
    n: usize,
    scale: f64,
    bitrev: Vec<usize>,
    // e^{-j2πk/N}, k < N/2
    twiddles: Vec<Complex64>,
}

impl Dft {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::config(format!(
                "block length {n} is not a power of two >= 2"
            )));
        }
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        let twiddles = (0..n / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        Ok(Dft {
            n,
            scale: 1.0 / (n as f64).sqrt(),
            bitrev,
            twiddles,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn radix2(&self, v: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(v.len(), self.n);
        for i in 0..self.n {
            let j = self.bitrev[i];
            if i < j {
                v.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.n {
            let stride = self.n / (2 * half);
            for start in (0..self.n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let t = v[start + k + half] * w;
                    let u = v[start + k];
                    v[start + k] = u + t;
                    v[start + k + half] = u - t;
                }
            }
            half *= 2;
        }
        counters::record_fft(self.n);
    }

    /// `v <- D v`: `V(k) = Σ_n v(n) e^{-j2πkn/N}`.
    pub fn forward_in_place(&self, v: &mut [Complex64]) {
        self.radix2(v, false);
    }

    /// `v <- D^H v`: `V(n) = Σ_k v(k) e^{+j2πkn/N}`.
    pub fn inverse_in_place(&self, v: &mut [Complex64]) {
        self.radix2(v, true);
    }

    /// `v <- F v` (frequency to time, unitary).
    pub fn f_in_place(&self, v: &mut [Complex64]) {
        self.inverse_in_place(v);
        v.iter_mut().for_each(|z| *z *= self.scale);
    }

    /// `v <- F^H v` (time to frequency, unitary).
    pub fn fh_in_place(&self, v: &mut [Complex64]) {
        self.forward_in_place(v);
        v.iter_mut().for_each(|z| *z *= self.scale);
    }

    pub fn apply_f(&self, v: &ComplexBlock) -> Result<ComplexBlock> {
        v.expect(self.n, Domain::Frequency)?;
        let mut out = v.samples.clone();
        self.f_in_place(&mut out);
        Ok(ComplexBlock::time(out))
    }

    pub fn apply_fh(&self, v: &ComplexBlock) -> Result<ComplexBlock> {
        v.expect(self.n, Domain::Time)?;
        let mut out = v.samples.clone();
        self.fh_in_place(&mut out);
        Ok(ComplexBlock::frequency(out))
    }

    /// Frequency response `H = D h` of an impulse response with `L <= N` taps.
    pub fn apply_d_cols(&self, h: &[Complex64]) -> Result<ComplexBlock> {
        if h.len() > self.n {
            return Err(Error::config(format!(
                "impulse response of {} taps exceeds block length {}",
                h.len(),
                self.n
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        out[..h.len()].copy_from_slice(h);
        self.forward_in_place(&mut out);
        Ok(ComplexBlock::frequency(out))
    }

    /// First `taps` entries of `D^H v`.
    pub fn apply_dh_rows(&self, v: &ComplexBlock, taps: usize) -> Result<Vec<Complex64>> {
        v.expect(self.n, Domain::Frequency)?;
        if taps > self.n {
            return Err(Error::config(format!(
                "{taps} taps exceeds block length {}",
                self.n
            )));
        }
        let mut out = v.samples.clone();
        self.inverse_in_place(&mut out);
        out.truncate(taps);
        Ok(out)
    }
}

/// Diagonal CFO phase ramp `E(ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRamp {
    epsilon: f64,
    phasors: Vec<Complex64>,
}

impl PhaseRamp {
    pub fn new(epsilon: f64, n: usize) -> Result<Self> {
        check_cfo(epsilon)?;
        let step = 2.0 * PI * epsilon / n as f64;
        let phasors = (0..n)
            .map(|i| Complex64::from_polar(1.0, step * i as f64))
            .collect();
        Ok(PhaseRamp { epsilon, phasors })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.phasors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phasors.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.phasors
    }

    /// `v <- E(ε) v`.
    pub fn apply_in_place(&self, v: &mut [Complex64]) {
        debug_assert_eq!(v.len(), self.phasors.len());
        if self.epsilon == 0.0 {
            return;
        }
        for (z, p) in v.iter_mut().zip(&self.phasors) {
            *z *= p;
        }
        counters::record(0, v.len() as u64);
    }

    /// `v <- E(ε)^H v`.
    pub fn apply_conj_in_place(&self, v: &mut [Complex64]) {
        debug_assert_eq!(v.len(), self.phasors.len());
        if self.epsilon == 0.0 {
            return;
        }
        for (z, p) in v.iter_mut().zip(&self.phasors) {
            *z *= p.conj();
        }
        counters::record(0, v.len() as u64);
    }
}

pub fn cfo_ramp(epsilon: f64, n: usize) -> Result<PhaseRamp> {
    PhaseRamp::new(epsilon, n)
}

pub fn apply_ramp(ramp: &PhaseRamp, v: &ComplexBlock) -> Result<ComplexBlock> {
    check_len(ramp.len(), v.len())?;
    let mut out = v.clone();
    ramp.apply_in_place(&mut out.samples);
    Ok(out)
}

/// Solves `A x = b` for Hermitian positive-definite `A` (row-major, `L x L`)
/// by Cholesky factorization.
pub fn solve_hermitian(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = b.len();
    check_len(n * n, a.len())?;
    let max_diag = (0..n).map(|i| a[i * n + i].re.abs()).fold(0.0, f64::max);
    let floor = 1e-14 * max_diag;

    // Lower-triangular factor, A = G G^H.
    let mut g = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d -= g[j * n + k].norm_sqr();
        }
        if !(d > floor) || max_diag == 0.0 {
            return Err(Error::Singular { row: j, pivot: d });
        }
        let djj = d.sqrt();
        g[j * n + j] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= g[i * n + k] * g[j * n + k].conj();
            }
            g[i * n + j] = s / djj;
        }
    }
    // Forward then backward substitution.
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= g[i * n + k] * y[k];
        }
        y[i] = s / g[i * n + i].re;
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= g[k * n + i].conj() * x[k];
        }
        x[i] = s / g[i * n + i].re;
    }
    let nn = n as u64;
    counters::record(nn * nn * nn / 6 + nn * nn, nn * nn * nn / 6 + nn * nn);
    Ok(x)
}
