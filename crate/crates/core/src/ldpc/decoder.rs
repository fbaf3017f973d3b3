//! Flooding sum-product decoder (tanh rule).

use super::QcLdpcCode;

const MESSAGE_CLAMP: f64 = 60.0;
// Keeps atanh finite.
const TANH_LIMIT: f64 = 1.0 - 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Hard decisions on the whole codeword.
    pub codeword: Vec<u8>,
    /// Message bits taken from the systematic positions.
    pub message: Vec<u8>,
    /// All parity checks satisfied.
    pub converged: bool,
    /// Message-passing iterations run (0 if the channel decisions were
    /// already a codeword).
    pub iterations: usize,
}

fn hard(llr: &[f64]) -> Vec<u8> {
    llr.iter().map(|&l| u8::from(l < 0.0)).collect()
}

pub(super) fn decode(code: &QcLdpcCode, channel: &[f64], max_iters: usize) -> DecodeOutcome {
    let finish = |total: &[f64], converged: bool, iterations: usize| {
        let codeword = hard(total);
        DecodeOutcome {
            message: code.extract_message(&codeword),
            codeword,
            converged,
            iterations,
        }
    };
    let mut total = channel.to_vec();
    if code.is_codeword(&hard(&total)) {
        return finish(&total, true, 0);
    }

    let checks = code.checks();
    let edges: usize = checks.iter().map(Vec::len).sum();
    let mut c2v = vec![0.0; edges];
    let mut t = Vec::new();
    let mut prefix = Vec::new();
    for iter in 1..=max_iters {
        let mut next_total = channel.to_vec();
        let mut e0 = 0;
        for vars in checks {
            let deg = vars.len();
            t.clear();
            for (j, &v) in vars.iter().enumerate() {
                let v2c = (total[v] - c2v[e0 + j]).clamp(-MESSAGE_CLAMP, MESSAGE_CLAMP);
                t.push((v2c / 2.0).tanh());
            }
            // Products of all other edges via prefix/suffix scans.
            prefix.clear();
            let mut acc = 1.0;
            for &x in &t {
                prefix.push(acc);
                acc *= x;
            }
            let mut suffix = 1.0;
            for j in (0..deg).rev() {
                let prod = (prefix[j] * suffix).clamp(-TANH_LIMIT, TANH_LIMIT);
                let msg = 2.0 * prod.atanh();
                c2v[e0 + j] = msg;
                next_total[vars[j]] += msg;
                suffix *= t[j];
            }
            e0 += deg;
        }
        total = next_total;
        if code.is_codeword(&hard(&total)) {
            return finish(&total, true, iter);
        }
    }
    finish(&total, false, max_iters)
}
