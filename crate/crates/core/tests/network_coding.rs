//! Pair posteriors, XOR LLRs, the QC-LDPC code and the relay decoder.

mod common;

use common::*;
use plnc_core::ldpc::{gf2_rank, CodePreset, QcLdpcCode};
use plnc_core::ofdm::Constellation;
use plnc_core::plnc::{block_xor_llrs, pair_posterior, relay_decode_xor, terminal_extract, xor_llr, LLR_CLAMP};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::sync::OnceLock;

fn test96() -> &'static QcLdpcCode {
    static CODE: OnceLock<QcLdpcCode> = OnceLock::new();
    CODE.get_or_init(|| CodePreset::Test96.build().unwrap())
}

fn paper_scale() -> &'static QcLdpcCode {
    static CODE: OnceLock<QcLdpcCode> = OnceLock::new();
    CODE.get_or_init(|| CodePreset::PaperScale.build().unwrap())
}

fn bits(r: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| r.gen_range(0..2u8)).collect()
}

fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

#[test]
fn posterior_matches_naive_enumeration() {
    let bpsk = Constellation::bpsk();
    let mut r = rng(1);
    for _ in 0..200 {
        let v = random_vec(&mut r, 3);
        let noise_var = r.gen_range(0.05..2.0);
        let post = pair_posterior(v[0], [v[1], v[2]], noise_var, &bpsk).unwrap();
        let want = pair_posterior_naive(v[0], [v[1], v[2]], noise_var, bpsk.points());
        for (a, b) in post.probs().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        // Φ = log (p(+,-) + p(-,+)) / (p(+,+) + p(-,-))
        let phi = ((want[1] + want[2]) / (want[0] + want[3])).ln();
        let (llr, degenerate) = xor_llr(&post, &bpsk);
        assert!(!degenerate);
        assert!((llr[0] - phi.clamp(-LLR_CLAMP, LLR_CLAMP)).abs() < 1e-9);
    }
}

#[test]
fn concentrated_posterior_on_the_true_sum() {
    let bpsk = Constellation::bpsk();
    let g = [c(0.8, -0.3), c(-0.2, 0.9)];
    let post = pair_posterior(g[0] + g[1], g, 1e-6, &bpsk).unwrap();
    assert!((post.prob(0, 0) - 1.0).abs() < 1e-12);
    let post = pair_posterior(g[0] - g[1], g, 1e-6, &bpsk).unwrap();
    let (llr, _) = xor_llr(&post, &bpsk);
    assert_eq!(llr, vec![LLR_CLAMP]);
}

#[test]
fn block_llrs_stack_per_subcarrier_values() {
    let bpsk = Constellation::bpsk();
    let mut r = rng(2);
    let y = random_vec(&mut r, 10);
    let g = [random_vec(&mut r, 10), random_vec(&mut r, 10)];
    let out = block_xor_llrs(&y, [&g[0], &g[1]], 0.3, &bpsk).unwrap();
    assert_eq!(out.llrs.len(), 10);
    for k in 0..10 {
        let post = pair_posterior(y[k], [g[0][k], g[1][k]], 0.3, &bpsk).unwrap();
        assert_eq!(out.llrs[k], xor_llr(&post, &bpsk).0[0]);
    }
    assert!(block_xor_llrs(&y[..9], [&g[0], &g[1]], 0.3, &bpsk).is_err());
}

#[test]
fn code_shapes_and_rank() {
    let code = test96();
    assert_eq!((code.m(), code.n()), (48, 96));
    assert!(code.is_codeword(&vec![0; 96]));
    for code in [test96(), paper_scale()] {
        assert_eq!(gf2_rank(code.parity_check_rows()), code.n() / 2);
        assert_eq!(code.k(), code.n() / 2);
    }
    assert_eq!(paper_scale().n(), 1270);
}

#[test]
fn xor_of_codewords_is_the_codeword_of_the_xor() {
    let mut r = rng(3);
    for code in [test96(), paper_scale()] {
        for _ in 0..1000 {
            let (b1, b2) = (bits(&mut r, code.k()), bits(&mut r, code.k()));
            let sum = xor(&code.encode(&b1).unwrap(), &code.encode(&b2).unwrap());
            assert!(code.is_codeword(&sum));
            assert_eq!(sum, code.encode(&xor(&b1, &b2)).unwrap());
        }
    }
}

#[test]
fn saturated_llrs_decode_without_iterations() {
    let mut r = rng(4);
    let code = test96();
    for _ in 0..50 {
        let m = bits(&mut r, code.k());
        let cw = code.encode(&m).unwrap();
        let llr: Vec<f64> = cw.iter().map(|&b| if b == 0 { 40.0 } else { -40.0 }).collect();
        let out = code.decode_bp(&llr, 50).unwrap();
        assert_eq!((out.iterations, out.converged), (0, true));
        assert_eq!(out.message, m);
    }
    let out = relay_decode_xor(code, &vec![-40.0; 96], 50).unwrap();
    assert!(out.message.iter().all(|&b| b == 0));
}

#[test]
fn awgn_bpsk_at_three_db() {
    let code = test96();
    let mut r = rng(5);
    let ebn0 = 10f64.powf(0.3);
    let sigma = (1.0 / (2.0 * code.rate() * ebn0)).sqrt();
    let (mut errors, mut total) = (0usize, 0usize);
    for _ in 0..10_000 {
        let m = bits(&mut r, code.k());
        let cw = code.encode(&m).unwrap();
        let llr: Vec<f64> = cw
            .iter()
            .map(|&b| {
                let noise: f64 = StandardNormal.sample(&mut r);
                let y = if b == 0 { 1.0 } else { -1.0 } + sigma * noise;
                2.0 * y / (sigma * sigma)
            })
            .collect();
        let out = code.decode_bp(&llr, 50).unwrap();
        errors += out.message.iter().zip(&m).filter(|(a, b)| a != b).count();
        total += m.len();
    }
    let ber = errors as f64 / total as f64;
    println!("test-96 AWGN BER at 3 dB: {ber:.3e}");
    assert!(ber < 1e-2, "{ber}");
}

#[test]
fn relay_recovers_the_xor_at_high_snr() {
    let code = test96();
    let bpsk = Constellation::bpsk();
    let mut r = rng(6);
    let noise_var = 0.01;
    let mut correct = 0;
    for _ in 0..1000 {
        let (b1, b2) = (bits(&mut r, code.k()), bits(&mut r, code.k()));
        let (c1, c2) = (code.encode(&b1).unwrap(), code.encode(&b2).unwrap());
        let s = |b: u8| if b == 0 { 1.0 } else { -1.0 };
        let g = [random_vec(&mut r, 96), random_vec(&mut r, 96)];
        let y: Vec<C> = (0..96)
            .map(|k| g[0][k] * s(c1[k]) + g[1][k] * s(c2[k]) + plnc_core::channel::complex_gaussian(&mut r, noise_var))
            .collect();
        let llr = block_xor_llrs(&y, [&g[0], &g[1]], noise_var, &bpsk).unwrap();
        let out = relay_decode_xor(code, &llr.llrs, 50).unwrap();
        correct += usize::from(out.message == xor(&b1, &b2));
    }
    assert!(correct >= 999, "{correct}/1000");
}

#[test]
fn extract_matches_bitwise_oracle() {
    let mut r = rng(7);
    let (a, b) = (bits(&mut r, 1270), bits(&mut r, 1270));
    let got = terminal_extract(&a, &b).unwrap();
    for i in 0..1270 {
        assert_eq!(got[i], u8::from((a[i] == 1) != (b[i] == 1)));
    }
    assert_eq!(terminal_extract(&xor(&a, &b), &a).unwrap(), b);
}

fn cplx() -> impl Strategy<Value = C> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| c(a, b))
}

fn phi(y: C, g: [C; 2], noise_var: f64) -> f64 {
    let bpsk = Constellation::bpsk();
    xor_llr(&pair_posterior(y, g, noise_var, &bpsk).unwrap(), &bpsk).0[0]
}

proptest! {
    #[test]
    fn llr_symmetries(y in cplx(), g1 in cplx(), g2 in cplx(), var in 0.05f64..3.0) {
        let base = phi(y, [g1, g2], var);
        prop_assume!(base.abs() < LLR_CLAMP - 1.0);
        // Negating one gain flips that terminal's bit, hence the XOR.
        prop_assert!((phi(y, [-g1, g2], var) + base).abs() < 1e-9);
        // Swapping the terminals leaves the XOR alone.
        prop_assert!((phi(y, [g2, g1], var) - base).abs() < 1e-9);
        // Negating everything maps each pair to its negation.
        prop_assert!((phi(-y, [g1, g2], var) - base).abs() < 1e-9);
    }

    #[test]
    fn llr_scaling_invariance(y in cplx(), g1 in cplx(), g2 in cplx(), var in 0.05f64..3.0, s in cplx()) {
        prop_assume!(s.norm() > 0.1);
        let base = phi(y, [g1, g2], var);
        prop_assume!(base.abs() < LLR_CLAMP - 1.0);
        let scaled = phi(s * y, [s * g1, s * g2], var * s.norm_sqr());
        prop_assert!((scaled - base).abs() < 1e-8 * base.abs().max(1.0));
    }

    #[test]
    fn xor_of_random_codewords_is_valid(seed in any::<u64>()) {
        let mut r = rng(seed);
        let code = test96();
        let (b1, b2) = (bits(&mut r, code.k()), bits(&mut r, code.k()));
        let sum = xor(&code.encode(&b1).unwrap(), &code.encode(&b2).unwrap());
        prop_assert!(code.is_codeword(&sum));
        prop_assert_eq!(code.extract_message(&sum), xor(&b1, &b2));
    }

    #[test]
    fn extract_is_an_involution(a in prop::collection::vec(0u8..2, 1..300), seed in any::<u64>()) {
        let mut r = rng(seed);
        let own = bits(&mut r, a.len());
        let once = terminal_extract(&a, &own).unwrap();
        prop_assert_eq!(terminal_extract(&once, &own).unwrap(), a);
    }
}
