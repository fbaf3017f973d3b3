//! Quasi-cyclic LDPC codes shared by both terminals and the relay.
//!
//! A code is lifted from a base matrix of circulant shifts (`-1` for an
//! all-zero block). The shipped base matrices put the information blocks
//! first and use a dual-diagonal parity part with one weight-3 column, which
//! makes the parity part invertible. Encoding is systematic; decoding is
//! flooding sum-product.

mod decoder;
mod gf2;

pub use decoder::DecodeOutcome;
pub use gf2::{gf2_rank, BitRow};

use crate::{Error, Result};
use std::collections::HashSet;

/// Circulant-shift base matrix and lift size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseMatrix {
    pub lift: usize,
    pub shifts: Vec<Vec<i32>>,
}

impl BaseMatrix {
    /// Parses the text asset format: `#` comments, a `lift Z` line, then one
    /// line of whitespace-separated shifts per block row.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lift = None;
        let mut shifts: Vec<Vec<i32>> = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: no + 1, msg };
            if let Some(z) = line.strip_prefix("lift") {
                lift = Some(z.trim().parse::<usize>().map_err(|e| bad(e.to_string()))?);
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<i32>().map_err(|e| bad(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            if let Some(first) = shifts.first() {
                if first.len() != row.len() {
                    return Err(bad("ragged base matrix".into()));
                }
            }
            shifts.push(row);
        }
        let lift = lift.ok_or_else(|| Error::Code("missing 'lift' line".into()))?;
        if shifts.is_empty() {
            return Err(Error::Code("empty base matrix".into()));
        }
        Ok(BaseMatrix { lift, shifts })
    }
}

/// Named code presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodePreset {
    /// 48 x 96, lift 12.
    Test96,
    /// 635 x 1270, lift 127.
    PaperScale,
}

impl CodePreset {
    pub const ALL: [CodePreset; 2] = [CodePreset::Test96, CodePreset::PaperScale];

    pub fn name(self) -> &'static str {
        match self {
            CodePreset::Test96 => "test-96",
            CodePreset::PaperScale => "paper-scale",
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        CodePreset::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::config(format!("unknown code preset '{name}'")))
    }

    /// Versioned base-matrix asset.
    pub fn asset(self) -> &'static str {
        match self {
            CodePreset::Test96 => include_str!("assets/test-96.v1.txt"),
            CodePreset::PaperScale => include_str!("assets/paper-scale.v1.txt"),
        }
    }

    pub fn build(self) -> Result<QcLdpcCode> {
        let base = BaseMatrix::parse(self.asset())?;
        let mut code = build_code(&base)?;
        code.name = self.name().to_string();
        Ok(code)
    }
}

#[derive(Debug, Clone)]
pub struct QcLdpcCode {
    name: String,
    n: usize,
    m: usize,
    lift: usize,
    /// Variable indices of each check.
    checks: Vec<Vec<usize>>,
    /// Codeword positions carrying message bits, in message order.
    info_positions: Vec<usize>,
    /// `(parity position, mask over message bits)`.
    parity_rules: Vec<(usize, BitRow)>,
}

/// Lifts `base` into a parity-check matrix and prepares the encoder.
///
/// Fails if the lifted Tanner graph has a 4-cycle or the parity-check matrix
/// is rank deficient.
pub fn build_code(base: &BaseMatrix) -> Result<QcLdpcCode> {
    let z = base.lift;
    if z == 0 {
        return Err(Error::Code("lift size must be positive".into()));
    }
    let mb = base.shifts.len();
    let nb = base.shifts[0].len();
    let (m, n) = (mb * z, nb * z);
    let mut checks = vec![Vec::new(); m];
    for (r, row) in base.shifts.iter().enumerate() {
        for (c, &s) in row.iter().enumerate() {
            if s < 0 {
                continue;
            }
            if s as usize >= z {
                return Err(Error::Code(format!("shift {s} out of range for lift {z}")));
            }
            for t in 0..z {
                checks[r * z + t].push(c * z + (t + s as usize) % z);
            }
        }
    }
    for row in &mut checks {
        row.sort_unstable();
    }
    if let Some((a, b)) = find_four_cycle(&checks, n) {
        return Err(Error::Code(format!("4-cycle through checks {a} and {b}")));
    }

    let rows: Vec<BitRow> = checks
        .iter()
        .map(|vars| {
            let mut row = BitRow::zeros(n);
            vars.iter().for_each(|&v| row.set(v));
            row
        })
        .collect();
    let (info_positions, parity_rules) = gf2::systematic_form(rows, n)?;
    if parity_rules.len() != m {
        return Err(Error::Code(format!(
            "parity-check matrix has rank {} < {m}",
            parity_rules.len()
        )));
    }
    Ok(QcLdpcCode {
        name: String::from("custom"),
        n,
        m,
        lift: z,
        checks,
        info_positions,
        parity_rules,
    })
}

fn find_four_cycle(checks: &[Vec<usize>], n: usize) -> Option<(usize, usize)> {
    let mut var_checks = vec![Vec::new(); n];
    for (c, vars) in checks.iter().enumerate() {
        for &v in vars {
            var_checks[v].push(c);
        }
    }
    let mut seen = HashSet::new();
    for cs in &var_checks {
        for (i, &a) in cs.iter().enumerate() {
            for &b in &cs[i + 1..] {
                if !seen.insert((a, b)) {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

impl QcLdpcCode {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Codeword length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of parity checks.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Message length.
    pub fn k(&self) -> usize {
        self.n - self.m
    }

    pub fn lift(&self) -> usize {
        self.lift
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Dense rows of `H` (for rank checks and tests).
    pub fn parity_check_rows(&self) -> Vec<BitRow> {
        self.checks
            .iter()
            .map(|vars| {
                let mut row = BitRow::zeros(self.n);
                vars.iter().for_each(|&v| row.set(v));
                row
            })
            .collect()
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        crate::error::check_len(self.k(), message.len())?;
        let msg = BitRow::from_bits(message);
        let mut cw = vec![0u8; self.n];
        for (&p, &b) in self.info_positions.iter().zip(message) {
            cw[p] = b & 1;
        }
        for (pos, mask) in &self.parity_rules {
            cw[*pos] = mask.dot(&msg);
        }
        Ok(cw)
    }

    /// `H c^T == 0`.
    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.n
            && self
                .checks
                .iter()
                .all(|vars| vars.iter().fold(0u8, |acc, &v| acc ^ (word[v] & 1)) == 0)
    }

    /// Message bits of a codeword.
    pub fn extract_message(&self, word: &[u8]) -> Vec<u8> {
        self.info_positions.iter().map(|&p| word[p]).collect()
    }

    /// Sum-product decoding of channel LLRs `log P(0)/P(1)`.
    pub fn decode_bp(&self, llr: &[f64], max_iters: usize) -> Result<DecodeOutcome> {
        crate::error::check_len(self.n, llr.len())?;
        Ok(decoder::decode(self, llr, max_iters))
    }
}
