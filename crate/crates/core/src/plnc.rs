//! Network-coding map at the relay: per-subcarrier pair posteriors on the
//! ICI-cancelled samples, XOR log-likelihood ratios, and channel decoding of
//! the XORed codeword.
//!
//! With the residual ICI treated as negligible, each subcarrier's posterior
//! depends only on that subcarrier:
//! `p(u1 = a, u2 = b | ·) ∝ exp{-|Y'(k) - aΓ1(k) - bΓ2(k)|² / σ²}`.

use crate::error::check_len;
use crate::ldpc::{DecodeOutcome, QcLdpcCode};
use crate::ofdm::Constellation;
use crate::{Error, Result};
use num_complex::Complex64;

/// Magnitude bound of every XOR LLR.
pub const LLR_CLAMP: f64 = 40.0;

/// Posterior over the `|C|²` symbol pairs of one subcarrier; entry
/// `a * |C| + b` is `p(u1 = C[a], u2 = C[b])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairPosterior {
    order: usize,
    log_probs: Vec<f64>,
}

impl PairPosterior {
    pub fn from_log_weights(order: usize, mut log_w: Vec<f64>) -> Self {
        let lse = log_sum_exp(log_w.iter().copied());
        log_w.iter_mut().for_each(|l| *l -= lse);
        PairPosterior {
            order,
            log_probs: log_w,
        }
    }

    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.log_probs[a * self.order + b].exp()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().map(|l| l.exp()).collect()
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.map(|x| (x - max).exp()).sum::<f64>().ln()
}

pub fn pair_posterior(
    y: Complex64,
    gamma: [Complex64; 2],
    noise_var: f64,
    constellation: &Constellation,
) -> Result<PairPosterior> {
    if !(noise_var > 0.0) {
        return Err(Error::config("pair posterior needs a positive noise variance"));
    }
    let pts = constellation.points();
    let mut log_w = Vec::with_capacity(pts.len() * pts.len());
    for &a in pts {
        for &b in pts {
            log_w.push(-(y - a * gamma[0] - b * gamma[1]).norm_sqr() / noise_var);
        }
    }
    Ok(PairPosterior::from_log_weights(pts.len(), log_w))
}

/// XOR LLRs of one subcarrier, one per label bit,
/// `Φ = log Σ_{xor=1} p / Σ_{xor=0} p`, clamped to `±LLR_CLAMP`.
/// The flag reports whether any value hit the clamp because a hypothesis set
/// had zero probability.
pub fn xor_llr(posterior: &PairPosterior, constellation: &Constellation) -> (Vec<f64>, bool) {
    let m = constellation.len();
    let mut degenerate = false;
    let llrs = (0..constellation.bits_per_symbol())
        .map(|j| {
            let set = |want: u8| {
                (0..m * m).filter(move |&ab| {
                    (constellation.label_bit(ab / m, j) ^ constellation.label_bit(ab % m, j)) == want
                })
            };
            let one = log_sum_exp(set(1).map(|ab| posterior.log_probs[ab]));
            let zero = log_sum_exp(set(0).map(|ab| posterior.log_probs[ab]));
            if !one.is_finite() || !zero.is_finite() {
                degenerate = true;
            }
            let phi = one - zero;
            if phi.is_nan() {
                0.0
            } else {
                phi.clamp(-LLR_CLAMP, LLR_CLAMP)
            }
        })
        .collect();
    (llrs, degenerate)
}

/// XOR LLRs of a whole block of ICI-cancelled samples.
#[derive(Debug, Clone, PartialEq)]
pub struct XorLlrs {
    pub llrs: Vec<f64>,
    pub degenerate: usize,
}

pub fn block_xor_llrs(
    cancelled: &[Complex64],
    gammas: [&[Complex64]; 2],
    noise_var: f64,
    constellation: &Constellation,
) -> Result<XorLlrs> {
    check_len(cancelled.len(), gammas[0].len())?;
    check_len(cancelled.len(), gammas[1].len())?;
    let mut out = XorLlrs {
        llrs: Vec::with_capacity(cancelled.len() * constellation.bits_per_symbol()),
        degenerate: 0,
    };
    for k in 0..cancelled.len() {
        let post = pair_posterior(cancelled[k], [gammas[0][k], gammas[1][k]], noise_var, constellation)?;
        let (llrs, degenerate) = xor_llr(&post, constellation);
        out.llrs.extend(llrs);
        out.degenerate += usize::from(degenerate);
    }
    Ok(out)
}

/// Decodes `b1 ⊕ b2` from XOR LLRs of one codeword. Both terminals use the
/// same linear code, so `c1 ⊕ c2` is itself a codeword.
pub fn relay_decode_xor(code: &QcLdpcCode, xor_llrs: &[f64], max_iters: usize) -> Result<DecodeOutcome> {
    // The decoder takes log P(0)/P(1); XOR LLRs are log P(1)/P(0).
    let llr: Vec<f64> = xor_llrs.iter().map(|l| -l).collect();
    code.decode_bp(&llr, max_iters)
}

/// What a terminal recovers in the broadcast phase: `(b1 ⊕ b2) ⊕ b_own`.
pub fn terminal_extract(xor_bits: &[u8], own_bits: &[u8]) -> Result<Vec<u8>> {
    check_len(xor_bits.len(), own_bits.len())?;
    Ok(xor_bits.iter().zip(own_bits).map(|(a, b)| a ^ b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn noiseless_sum_concentrates_on_true_pair() {
        let bpsk = Constellation::bpsk();
        let g = [c(0.8, -0.3), c(-0.2, 0.9)];
        let post = pair_posterior(g[0] + g[1], g, 1e-4, &bpsk).unwrap();
        assert!(post.prob(0, 0) > 1.0 - 1e-12);
        assert!((post.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn second_terminal_absent_gives_uniform_marginal() {
        let bpsk = Constellation::bpsk();
        let post = pair_posterior(c(0.3, 0.1), [c(1.0, 0.0), c(0.0, 0.0)], 0.5, &bpsk).unwrap();
        for a in 0..2 {
            assert!((post.prob(a, 0) - post.prob(a, 1)).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_positive_noise() {
        let bpsk = Constellation::bpsk();
        assert!(pair_posterior(c(0.0, 0.0), [c(1.0, 0.0); 2], 0.0, &bpsk).is_err());
    }

    #[test]
    fn uniform_posterior_has_zero_llr() {
        let bpsk = Constellation::bpsk();
        let post = PairPosterior::from_log_weights(2, vec![0.0; 4]);
        let (llr, degenerate) = xor_llr(&post, &bpsk);
        assert_eq!(llr, vec![0.0]);
        assert!(!degenerate);
    }

    #[test]
    fn pure_xor_one_evidence_clamps() {
        let bpsk = Constellation::bpsk();
        // all mass on (+1, -1)
        let post = PairPosterior::from_log_weights(
            2,
            vec![f64::NEG_INFINITY, 0.0, f64::NEG_INFINITY, f64::NEG_INFINITY],
        );
        let (llr, degenerate) = xor_llr(&post, &bpsk);
        assert_eq!(llr, vec![LLR_CLAMP]);
        assert!(degenerate);
    }

    #[test]
    fn extract_is_involutive() {
        let a = [1u8, 0, 1, 1];
        let b = [0u8, 0, 1, 0];
        let x = terminal_extract(&a, &b).unwrap();
        assert_eq!(terminal_extract(&x, &b).unwrap(), a.to_vec());
        assert!(terminal_extract(&a, &b[..3]).is_err());
    }
}
