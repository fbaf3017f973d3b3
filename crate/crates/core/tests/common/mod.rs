//! Shared helpers for the integration tests: dense-matrix reference
//! evaluations built straight from the block model, and random instances.

#![allow(dead_code)]

use num_complex::Complex64;
use plnc_core::ofdm::SubcarrierAllocation;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use std::f64::consts::PI;

pub type C = Complex64;
pub type Mat = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C> {
    (0..n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn random_bpsk(rng: &mut ChaCha8Rng, n: usize) -> Vec<C> {
    (0..n)
        .map(|_| c(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0))
        .collect()
}

pub fn max_abs_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn zeros(r: usize, s: usize) -> Mat {
    vec![vec![c(0.0, 0.0); s]; r]
}

/// `F(p, q) = N^{-1/2} e^{j2πpq/N}`.
pub fn f_matrix(n: usize) -> Mat {
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|p| {
            (0..n)
                .map(|q| C::from_polar(s, 2.0 * PI * (p * q) as f64 / n as f64))
                .collect()
        })
        .collect()
}

/// `D(k, l) = e^{-j2πkl/N}`, `N x L`.
pub fn d_matrix(n: usize, l: usize) -> Mat {
    (0..n)
        .map(|k| {
            (0..l)
                .map(|t| C::from_polar(1.0, -2.0 * PI * (k * t) as f64 / n as f64))
                .collect()
        })
        .collect()
}

/// `E(ε) = diag(e^{j2πnε/N})`.
pub fn e_matrix(eps: f64, n: usize) -> Mat {
    diag(&(0..n)
        .map(|t| C::from_polar(1.0, 2.0 * PI * t as f64 * eps / n as f64))
        .collect::<Vec<_>>())
}

/// `N x K` allocation matrix.
pub fn a_matrix(alloc: &SubcarrierAllocation) -> Mat {
    let mut a = zeros(alloc.n(), alloc.k());
    for (col, &q) in alloc.indices().iter().enumerate() {
        a[q][col] = c(1.0, 0.0);
    }
    a
}

pub fn diag(v: &[C]) -> Mat {
    let mut m = zeros(v.len(), v.len());
    for (i, &x) in v.iter().enumerate() {
        m[i][i] = x;
    }
    m
}

pub fn herm(a: &Mat) -> Mat {
    let (r, s) = (a.len(), a[0].len());
    (0..s).map(|j| (0..r).map(|i| a[i][j].conj()).collect()).collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let (r, s) = (a.len(), a[0].len());
    (0..s).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn mm(a: &Mat, b: &Mat) -> Mat {
    let (r, inner, s) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), inner);
    (0..r)
        .map(|i| (0..s).map(|j| (0..inner).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn mv(a: &Mat, v: &[C]) -> Vec<C> {
    assert_eq!(a[0].len(), v.len());
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn add(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn madd(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| add(r, s)).collect()
}

/// Gauss-Jordan elimination with partial pivoting.
pub fn solve_dense(a: &Mat, b: &[C]) -> Vec<C> {
    let n = b.len();
    let mut m: Mat = a.iter().zip(b).map(|(row, &r)| {
        let mut row = row.clone();
        row.push(r);
        row
    }).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap())
            .unwrap();
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    m.into_iter().map(|row| row[n]).collect()
}

/// One terminal's term `E(ε) F A u D h` of the relay observation, where
/// `X = diag(A u)`.
pub fn terminal_term(alloc: &SubcarrierAllocation, eps: f64, u: &[C], h: &[C]) -> Vec<C> {
    let n = alloc.n();
    let x = diag(&mv(&a_matrix(alloc), u));
    let m = mm(&mm(&e_matrix(eps, n), &f_matrix(n)), &mm(&x, &d_matrix(n, h.len())));
    mv(&m, h)
}

/// `Π(ε) = F^H E(ε) F`.
pub fn pi_matrix(eps: f64, n: usize) -> Mat {
    let f = f_matrix(n);
    mm(&mm(&herm(&f), &e_matrix(eps, n)), &f)
}

/// Time-domain samples of one terminal built sample by sample: IDFT of the
/// allocated symbols, cyclic prefix, linear convolution with the taps,
/// prefix removal, then the CFO rotation of each retained sample.
pub fn sample_level_terminal(alloc: &SubcarrierAllocation, eps: f64, u: &[C], h: &[C], cp: usize) -> Vec<C> {
    let n = alloc.n();
    let mut x = vec![c(0.0, 0.0); n];
    for (&q, &s) in alloc.indices().iter().zip(u) {
        x[q] = s;
    }
    let s: Vec<C> = (0..n)
        .map(|t| {
            (0..n)
                .map(|k| x[k] * C::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * (k * t) as f64 / n as f64))
                .sum()
        })
        .collect();
    let mut tx: Vec<C> = s[n - cp..].to_vec();
    tx.extend_from_slice(&s);
    let rx: Vec<C> = (0..tx.len())
        .map(|t| (0..h.len()).filter(|&l| l <= t).map(|l| h[l] * tx[t - l]).sum())
        .collect();
    rx[cp..]
        .iter()
        .enumerate()
        .map(|(t, &v)| v * C::from_polar(1.0, 2.0 * PI * t as f64 * eps / n as f64))
        .collect()
}

/// Dense MMSE channel estimate
/// `(σ² R^{-1} + D^H X^H X D)^{-1} D^H X^H F^H E^H(ε) ŷ`.
pub fn mmse_dense(
    alloc: &SubcarrierAllocation,
    hidden: &[C],
    eps: f64,
    u: &[C],
    prior: &[f64],
    noise_var: f64,
) -> Vec<C> {
    let n = alloc.n();
    let l = prior.len();
    let x = diag(&mv(&a_matrix(alloc), u));
    let xd = mm(&x, &d_matrix(n, l));
    let mut normal = mm(&herm(&xd), &xd);
    for (i, v) in prior.iter().enumerate() {
        normal[i][i] += noise_var / v;
    }
    let rhs_op = mm(&mm(&herm(&xd), &herm(&f_matrix(n))), &herm(&e_matrix(eps, n)));
    solve_dense(&normal, &mv(&rhs_op, hidden))
}

/// Reconstructed ICI `Σ_i (Π(ε_i) - Λ(ε_i) I) A u_i ∘ D h_i`, dense.
pub fn ici_dense(alloc: &SubcarrierAllocation, eps: [f64; 2], u: [&[C]; 2], h: [&[C]; 2]) -> Vec<C> {
    let n = alloc.n();
    let mut out = vec![c(0.0, 0.0); n];
    for i in 0..2 {
        let mut p = pi_matrix(eps[i], n);
        let lambda = p[0][0];
        for (k, row) in p.iter_mut().enumerate() {
            row[k] -= lambda;
        }
        let s: Vec<C> = mv(&a_matrix(alloc), u[i])
            .iter()
            .zip(mv(&d_matrix(n, h[i].len()), h[i]))
            .map(|(a, b)| a * b)
            .collect();
        out = add(&out, &mv(&p, &s));
    }
    out
}

/// Pair posterior by direct enumeration with plain exponentials.
pub fn pair_posterior_naive(y: C, g: [C; 2], noise_var: f64, points: &[C]) -> Vec<f64> {
    let w: Vec<f64> = points
        .iter()
        .flat_map(|&a| points.iter().map(move |&b| (a, b)))
        .map(|(a, b)| (-(y - a * g[0] - b * g[1]).norm_sqr() / noise_var).exp())
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Objective of the CFO step, `Re{ŷ^H E(ε) Ω}`.
pub fn cfo_objective(hidden: &[C], omega: &[C], eps: f64) -> f64 {
    let n = hidden.len();
    hidden
        .iter()
        .zip(omega)
        .enumerate()
        .map(|(t, (y, w))| (y.conj() * C::from_polar(1.0, 2.0 * PI * t as f64 * eps / n as f64) * w).re)
        .sum()
}
