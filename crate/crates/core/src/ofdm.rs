//! Terminal-side OFDM plumbing: subcarrier allocation, BPSK mapping, frame
//! segmentation and the block-level multiple-access reception model.

use crate::counters;
use crate::error::check_len;
use crate::linalg::{ComplexBlock, Dft, PhaseRamp};
use crate::{Error, Result};
use num_complex::Complex64;

/// Which subcarriers carry data. Both terminals share one allocation.
///
/// Stores the active subcarrier index of each of the `K` data symbols, i.e.
/// the position of the single 1 in each column of the `N x K` allocation
/// matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcarrierAllocation {
    n: usize,
    indices: Vec<usize>,
}

impl SubcarrierAllocation {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::config("allocation must contain at least one subcarrier"));
        }
        let mut seen = vec![false; n];
        for &q in &indices {
            if q >= n {
                return Err(Error::config(format!("subcarrier {q} outside block of {n}")));
            }
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::config(format!("subcarrier {q} allocated twice")));
            }
        }
        Ok(SubcarrierAllocation { n, indices })
    }

    /// All `N` subcarriers, in order.
    pub fn full(n: usize) -> Self {
        SubcarrierAllocation {
            n,
            indices: (0..n).collect(),
        }
    }

    /// Block length `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of data subcarriers `K`.
    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `x = A u`.
    pub fn allocate(&self, u: &[Complex64]) -> Result<ComplexBlock> {
        check_len(self.k(), u.len())?;
        let mut x = vec![Complex64::new(0.0, 0.0); self.n];
        for (&q, &s) in self.indices.iter().zip(u) {
            x[q] = s;
        }
        Ok(ComplexBlock::frequency(x))
    }

    /// `u = A^T x`.
    pub fn deallocate(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.n, x.len())?;
        Ok(self.indices.iter().map(|&q| x[q]).collect())
    }
}

/// A labelled constellation. Point `i` carries the bit label `labels[i]`
/// (most significant bit first over `bits_per_symbol` bits).
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
    labels: Vec<u32>,
    bits_per_symbol: usize,
}

impl Constellation {
    /// BPSK with bit 0 -> +1 and bit 1 -> -1.
    pub fn bpsk() -> Self {
        Constellation {
            points: vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            labels: vec![0, 1],
            bits_per_symbol: 1,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Constellation::bpsk()),
            other => Err(Error::config(format!("unsupported modulation '{other}'"))),
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.points.contains(&z)
    }

    pub fn is_unit_modulus(&self) -> bool {
        self.points.iter().all(|p| (p.norm_sqr() - 1.0).abs() < 1e-12)
    }

    /// Bit `j` (0 = most significant) of the label of point `i`.
    pub fn label_bit(&self, i: usize, j: usize) -> u8 {
        ((self.labels[i] >> (self.bits_per_symbol - 1 - j)) & 1) as u8
    }

    /// Maps a bit stream to symbols; its length must be a multiple of the
    /// bits per symbol.
    pub fn map(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let m = self.bits_per_symbol;
        if bits.len() % m != 0 {
            return Err(Error::config(format!(
                "{} bits do not fill whole {m}-bit symbols",
                bits.len()
            )));
        }
        bits.chunks(m)
            .map(|chunk| {
                let label = chunk.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b & 1));
                self.labels
                    .iter()
                    .position(|&l| l == label)
                    .map(|i| self.points[i])
                    .ok_or_else(|| Error::config(format!("no point with label {label}")))
            })
            .collect()
    }
}

pub fn bpsk_map(bits: &[u8]) -> Vec<Complex64> {
    bits.iter()
        .map(|&b| Complex64::new(if b & 1 == 0 { 1.0 } else { -1.0 }, 0.0))
        .collect()
}

/// Single-user BPSK LLRs, `log P(b=0 | y) / P(b=1 | y) = 4 Re{y} / σ²`, for
/// circular complex noise of total variance `noise_var`.
pub fn bpsk_llr_demap(symbols: &[Complex64], noise_var: f64) -> Vec<f64> {
    symbols.iter().map(|y| 4.0 * y.re / noise_var).collect()
}

/// Splits a coded bit stream over `blocks` OFDM blocks of `k` symbols each,
/// zero-padding the tail of the last block.
pub fn segment_into_blocks(coded: &[u8], k: usize, blocks: usize) -> Result<Vec<Vec<u8>>> {
    if coded.len() > k * blocks {
        return Err(Error::config(format!(
            "{} coded bits do not fit in {blocks} blocks of {k} subcarriers",
            coded.len()
        )));
    }
    Ok((0..blocks)
        .map(|b| {
            let mut seg = vec![0u8; k];
            let start = (b * k).min(coded.len());
            let end = ((b + 1) * k).min(coded.len());
            seg[..end - start].copy_from_slice(&coded[start..end]);
            seg
        })
        .collect())
}

/// One terminal's per-frame data: message bits, the concatenated codewords,
/// and the per-block symbol vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalFrame {
    pub source_bits: Vec<u8>,
    pub coded_bits: Vec<u8>,
    pub block_symbols: Vec<Vec<Complex64>>,
}

impl TerminalFrame {
    pub fn blocks_per_frame(&self) -> usize {
        self.block_symbols.len()
    }
}

/// Time-domain contribution `E(ε) F X D h` of one terminal, where `x` is the
/// allocated frequency-domain block (`x = A u`, so `X = diag(x)`).
pub(crate) fn terminal_signal(
    dft: &Dft,
    x: &[Complex64],
    freq_response: &[Complex64],
    ramp: &PhaseRamp,
) -> Vec<Complex64> {
    let mut s: Vec<Complex64> = x.iter().zip(freq_response).map(|(a, b)| a * b).collect();
    counters::record(0, x.iter().filter(|z| z.norm_sqr() > 0.0).count() as u64);
    dft.f_in_place(&mut s);
    ramp.apply_in_place(&mut s);
    s
}

/// Noiseless relay observation of one block,
/// `E(ε1) F X1 D h1 + E(ε2) F X2 D h2`.
///
/// The cyclic prefix is assumed at least as long as both impulse responses,
/// so there is no inter-block interference and the block model is exact.
pub fn mac_signal_model(
    dft: &Dft,
    x: [&ComplexBlock; 2],
    h: [&[Complex64]; 2],
    eps: [f64; 2],
) -> Result<ComplexBlock> {
    let n = dft.len();
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..2 {
        check_len(n, x[i].len())?;
        let ramp = PhaseRamp::new(eps[i], n)?;
        let resp = dft.apply_d_cols(h[i])?;
        let s = terminal_signal(dft, x[i].samples(), resp.samples(), &ramp);
        for (acc, v) in y.iter_mut().zip(s) {
            *acc += v;
        }
    }
    Ok(ComplexBlock::time(y))
}
