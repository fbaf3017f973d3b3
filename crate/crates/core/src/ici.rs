//! Inter-carrier interference: the circulant interference matrix
//! `Π(ε) = F^H E(ε) F`, its diagonal `Λ(ε)`, and reconstruction and
//! cancellation of the off-diagonal (ICI) part.
//!
//! `Π` is never formed densely. Products use the factorization (three
//! length-N passes) and the diagonal comes from the Dirichlet-kernel sum.

use crate::counters;
use crate::error::{check_cfo, check_len};
use crate::linalg::{ComplexBlock, Dft, Domain, PhaseRamp};
use crate::ofdm::SubcarrierAllocation;
use crate::sage::ParamEstimate;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `Λ(ε) = (1/N) Σ_n e^{j2πnε/N}`, the common attenuation and phase every
/// subcarrier sees under CFO `ε`.
pub fn dirichlet_gain(epsilon: f64, n: usize) -> Complex64 {
    if epsilon == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let num = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * PI * epsilon);
    let den = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * PI * epsilon / n as f64);
    num / den / n as f64
}

/// Circulant `Π(ε)` stored as its first column, plus its constant diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceMatrix {
    epsilon: f64,
    first_column: Vec<Complex64>,
    diagonal: Complex64,
}

impl InterferenceMatrix {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n(&self) -> usize {
        self.first_column.len()
    }

    /// `Π(p, q)`; depends only on `(p - q) mod N`.
    pub fn entry(&self, p: usize, q: usize) -> Complex64 {
        let n = self.n();
        self.first_column[(p + n - q % n) % n]
    }

    pub fn first_column(&self) -> &[Complex64] {
        &self.first_column
    }

    /// `Λ(k)`, identical for every `k`.
    pub fn diagonal(&self) -> Complex64 {
        self.diagonal
    }
}

pub fn interference_matrix(dft: &Dft, epsilon: f64) -> Result<InterferenceMatrix> {
    check_cfo(epsilon)?;
    let n = dft.len();
    let diagonal = dirichlet_gain(epsilon, n);
    if epsilon == 0.0 {
        let mut first_column = vec![Complex64::new(0.0, 0.0); n];
        first_column[0] = Complex64::new(1.0, 0.0);
        return Ok(InterferenceMatrix {
            epsilon,
            first_column,
            diagonal,
        });
    }
    // Π e_0 = F^H E(ε) F e_0 = (1/N) D [e^{j2πnε/N}]_n
    let mut first_column = PhaseRamp::new(epsilon, n)?.entries().to_vec();
    dft.forward_in_place(&mut first_column);
    first_column.iter_mut().for_each(|z| *z /= n as f64);
    Ok(InterferenceMatrix {
        epsilon,
        first_column,
        diagonal,
    })
}

/// `(Π(ε) - Λ(ε)) s` for a frequency-domain vector `s`.
pub fn apply_offdiagonal(dft: &Dft, epsilon: f64, s: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(dft.len(), s.len())?;
    let ramp = PhaseRamp::new(epsilon, dft.len())?;
    let lambda = dirichlet_gain(epsilon, dft.len());
    let mut v = s.to_vec();
    dft.f_in_place(&mut v);
    ramp.apply_in_place(&mut v);
    dft.fh_in_place(&mut v);
    for (z, &si) in v.iter_mut().zip(s) {
        *z -= lambda * si;
    }
    counters::record(s.len() as u64, s.len() as u64);
    Ok(v)
}

/// `Ŝ_i = X̂_i D ĥ_i` on the full block (zeros off the allocation).
pub fn desired_component(
    dft: &Dft,
    alloc: &SubcarrierAllocation,
    symbols: &[Complex64],
    taps: &[Complex64],
) -> Result<Vec<Complex64>> {
    let resp = dft.apply_d_cols(taps)?;
    let mut s = vec![Complex64::new(0.0, 0.0); dft.len()];
    check_len(alloc.k(), symbols.len())?;
    for (&q, &x) in alloc.indices().iter().zip(symbols) {
        s[q] = x * resp.samples()[q];
    }
    counters::record(0, alloc.k() as u64);
    Ok(s)
}

/// Reconstructed ICI `Î_R = Σ_i (Π̂_i - Λ̂_i) Ŝ_i` from a complete estimate.
pub fn reconstruct_ici(
    dft: &Dft,
    estimate: &ParamEstimate,
    alloc: &SubcarrierAllocation,
) -> Result<ComplexBlock> {
    let n = dft.len();
    let mut ici = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..2 {
        if estimate.eps[i] == 0.0 {
            continue;
        }
        let s = desired_component(dft, alloc, &estimate.symbols[i], &estimate.taps[i])?;
        let part = apply_offdiagonal(dft, estimate.eps[i], &s)?;
        for (acc, p) in ici.iter_mut().zip(part) {
            *acc += p;
        }
        counters::record(n as u64, 0);
    }
    Ok(ComplexBlock::frequency(ici))
}

/// `Y'_R = A^T (Y_R - Î_R)`, the ICI-cancelled samples of the data
/// subcarriers.
pub fn cancel(
    y_freq: &ComplexBlock,
    ici: &ComplexBlock,
    alloc: &SubcarrierAllocation,
) -> Result<Vec<Complex64>> {
    for b in [y_freq, ici] {
        check_len(alloc.n(), b.len())?;
        if b.domain() != Domain::Frequency {
            return Err(Error::config("ICI cancellation works on frequency-domain blocks"));
        }
    }
    counters::record(alloc.k() as u64, 0);
    Ok(alloc
        .indices()
        .iter()
        .map(|&q| y_freq.samples()[q] - ici.samples()[q])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_cfo_is_identity() {
        let dft = Dft::new(8).unwrap();
        let pi = interference_matrix(&dft, 0.0).unwrap();
        for p in 0..8 {
            for q in 0..8 {
                let want = if p == q { 1.0 } else { 0.0 };
                assert_eq!(pi.entry(p, q), Complex64::new(want, 0.0));
            }
        }
        assert_eq!(pi.diagonal(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn diagonal_matches_first_column_head() {
        let dft = Dft::new(16).unwrap();
        for eps in [-0.3, -0.05, 0.1, 0.45] {
            let pi = interference_matrix(&dft, eps).unwrap();
            let direct: Complex64 = (0..16)
                .map(|n| Complex64::from_polar(1.0, 2.0 * PI * n as f64 * eps / 16.0))
                .sum::<Complex64>()
                / 16.0;
            assert!((pi.diagonal() - direct).norm() < 1e-14);
            assert!((pi.entry(3, 3) - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn cancel_with_zero_ici_is_restriction() {
        let alloc = SubcarrierAllocation::full(4);
        let y = ComplexBlock::frequency(vec![Complex64::new(1.0, 2.0); 4]);
        let z = ComplexBlock::zeros(4, Domain::Frequency);
        assert_eq!(cancel(&y, &z, &alloc).unwrap(), y.samples().to_vec());
        assert!(cancel(&y, &ComplexBlock::zeros(4, Domain::Time), &alloc).is_err());
    }
}
