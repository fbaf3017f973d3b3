//! Bit-packed GF(2) rows and elimination.

use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut r = BitRow::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                r.set(i);
            }
        }
        r
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitRow) -> u8 {
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        (ones & 1) as u8
    }
}

pub fn gf2_rank(mut rows: Vec<BitRow>) -> usize {
    let Some(cols) = rows.first().map(BitRow::len) else {
        return 0;
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        rank += 1;
    }
    rank
}

/// Reduces `H` to systematic form, choosing pivots from the last columns
/// first. Returns the message positions and, per pivot, the parity position
/// with its mask over the message bits.
pub(crate) fn systematic_form(
    mut rows: Vec<BitRow>,
    n: usize,
) -> Result<(Vec<usize>, Vec<(usize, BitRow)>)> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in (0..n).rev() {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(c);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let mut is_pivot = vec![false; n];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    let info: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let rules = pivots
        .iter()
        .enumerate()
        .map(|(r, &c)| {
            let mut mask = BitRow::zeros(info.len());
            for (j, &pos) in info.iter().enumerate() {
                if rows[r].get(pos) {
                    mask.set(j);
                }
            }
            (c, mask)
        })
        .collect();
    Ok((info, rules))
}
