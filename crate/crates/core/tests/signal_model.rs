//! Transforms, allocation, multiple-access model and channel statistics
//! against dense and sample-level references.

mod common;

use common::*;
use plnc_core::channel::{add_awgn, complex_gaussian, draw_cir, expected_mac_power, noise_variance};
use plnc_core::linalg::{apply_ramp, cfo_ramp, ComplexBlock, Dft};
use plnc_core::ofdm::{mac_signal_model, SubcarrierAllocation};
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::Rng;

fn any_vec(n: usize) -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0).prop_map(|(a, b)| c(a, b)), n)
}

#[test]
fn unitary_transform_matches_dense_matrix() {
    let dft = Dft::new(8).unwrap();
    let f = f_matrix(8);
    let mut r = rng(1);
    for _ in 0..20 {
        let v = random_vec(&mut r, 8);
        let got = dft.apply_f(&ComplexBlock::frequency(v.clone())).unwrap();
        assert!(max_abs_diff(got.samples(), &mv(&f, &v)) < 1e-12);
        let back = dft.apply_fh(&got).unwrap();
        let rel = max_abs_diff(back.samples(), &v) / v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(rel < 1e-12);
    }
}

#[test]
fn frequency_response_matches_dense_d() {
    let dft = Dft::new(8).unwrap();
    let d = d_matrix(8, 3);
    let mut r = rng(2);
    for _ in 0..20 {
        let h = random_vec(&mut r, 3);
        let got = dft.apply_d_cols(&h).unwrap();
        assert!(max_abs_diff(got.samples(), &mv(&d, &h)) < 1e-12);
    }
    assert!(dft.apply_d_cols(&vec![c(1.0, 0.0); 9]).is_err());
}

#[test]
fn ramp_at_quarter_offset() {
    let ramp = cfo_ramp(0.25, 4).unwrap();
    let want = [0.0, 1.0, 2.0, 3.0].map(|k| C::from_polar(1.0, k * std::f64::consts::PI / 8.0));
    assert!(max_abs_diff(ramp.entries(), &want) < 1e-15);
    let v = ComplexBlock::time(vec![c(2.0, -1.0); 4]);
    assert_eq!(apply_ramp(&cfo_ramp(0.0, 4).unwrap(), &v).unwrap(), v);
}

#[test]
fn allocation_matches_matrix_product() {
    let mut r = rng(3);
    for _ in 0..20 {
        let k = r.gen_range(1..=8);
        let mut idx = sample(&mut r, 8, k).into_vec();
        idx.sort_unstable();
        let alloc = SubcarrierAllocation::new(8, idx).unwrap();
        let u = random_vec(&mut r, k);
        let x = alloc.allocate(&u).unwrap();
        assert!(max_abs_diff(x.samples(), &mv(&a_matrix(&alloc), &u)) < 1e-15);
        let back = mv(&transpose(&a_matrix(&alloc)), x.samples());
        assert_eq!(alloc.deallocate(x.samples()).unwrap(), back);
        assert_eq!(back, u);
    }
}

fn random_instance(seed: u64) -> (SubcarrierAllocation, [Vec<C>; 2], [Vec<C>; 2], [f64; 2]) {
    let mut r = rng(seed);
    let alloc = if r.gen_bool(0.5) {
        SubcarrierAllocation::full(8)
    } else {
        SubcarrierAllocation::new(8, vec![0, 2, 3, 5, 6]).unwrap()
    };
    let u = [random_vec(&mut r, alloc.k()), random_vec(&mut r, alloc.k())];
    let h = [random_vec(&mut r, 3), random_vec(&mut r, 2)];
    let eps = [r.gen_range(-0.45..0.45), r.gen_range(-0.45..0.45)];
    (alloc, u, h, eps)
}

#[test]
fn relay_observation_matches_dense_model() {
    let dft = Dft::new(8).unwrap();
    for seed in 0..50 {
        let (alloc, u, h, eps) = random_instance(seed);
        let x = [alloc.allocate(&u[0]).unwrap(), alloc.allocate(&u[1]).unwrap()];
        let y = mac_signal_model(&dft, [&x[0], &x[1]], [&h[0], &h[1]], eps).unwrap();
        let want = add(
            &terminal_term(&alloc, eps[0], &u[0], &h[0]),
            &terminal_term(&alloc, eps[1], &u[1], &h[1]),
        );
        assert!(max_abs_diff(y.samples(), &want) < 1e-12, "seed {seed}");
    }
}

#[test]
fn relay_observation_matches_cyclic_prefix_convolution() {
    let dft = Dft::new(8).unwrap();
    for seed in 100..150 {
        let (alloc, u, h, eps) = random_instance(seed);
        let x = [alloc.allocate(&u[0]).unwrap(), alloc.allocate(&u[1]).unwrap()];
        let y = mac_signal_model(&dft, [&x[0], &x[1]], [&h[0], &h[1]], eps).unwrap();
        let want = add(
            &sample_level_terminal(&alloc, eps[0], &u[0], &h[0], 3),
            &sample_level_terminal(&alloc, eps[1], &u[1], &h[1], 3),
        );
        assert!(max_abs_diff(y.samples(), &want) < 1e-12, "seed {seed}");
    }
}

#[test]
fn silent_second_terminal_leaves_single_user_path() {
    let dft = Dft::new(8).unwrap();
    let (alloc, u, h, eps) = random_instance(7);
    let x1 = alloc.allocate(&u[0]).unwrap();
    let x2 = alloc.allocate(&vec![c(0.0, 0.0); alloc.k()]).unwrap();
    let y = mac_signal_model(&dft, [&x1, &x2], [&h[0], &h[1]], eps).unwrap();
    assert!(max_abs_diff(y.samples(), &terminal_term(&alloc, eps[0], &u[0], &h[0])) < 1e-12);
}

#[test]
fn zero_db_noise_equals_measured_signal_power() {
    let n = 64;
    let dft = Dft::new(n).unwrap();
    let alloc = SubcarrierAllocation::full(n);
    let mut r = rng(4);
    let blocks = 10_000;
    let mut power = 0.0;
    for _ in 0..blocks {
        let u = [random_bpsk(&mut r, n), random_bpsk(&mut r, n)];
        let h = [draw_cir(6, &mut r).unwrap().taps, draw_cir(6, &mut r).unwrap().taps];
        let x = [alloc.allocate(&u[0]).unwrap(), alloc.allocate(&u[1]).unwrap()];
        let y = mac_signal_model(&dft, [&x[0], &x[1]], [&h[0], &h[1]], [-0.1, 0.1]).unwrap();
        power += y.norm_sqr() / n as f64;
    }
    let measured = power / blocks as f64;
    let var = noise_variance(0.0, expected_mac_power(n, n));
    assert!((var / measured - 1.0).abs() < 0.02, "{var} vs {measured}");
}

#[test]
fn awgn_sample_variance() {
    let mut r = rng(5);
    let zero = ComplexBlock::time(vec![c(0.0, 0.0); 100_000]);
    let (w, var) = add_awgn(&zero, 7.0, 2.0, &mut r);
    assert!((w.norm_sqr() / 100_000.0 / var - 1.0).abs() < 0.03);
    let z: f64 = (0..100_000).map(|_| complex_gaussian(&mut r, 0.5).norm_sqr()).sum::<f64>() / 1e5;
    assert!((z / 0.5 - 1.0).abs() < 0.03);
}

proptest! {
    #[test]
    fn transform_is_unitary(v in any_vec(16)) {
        let dft = Dft::new(16).unwrap();
        let t = dft.apply_f(&ComplexBlock::frequency(v.clone())).unwrap();
        let energy: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((t.norm_sqr() - energy).abs() <= 1e-10 * energy.max(1.0));
        let back = dft.apply_fh(&t).unwrap();
        prop_assert!(max_abs_diff(back.samples(), &v) <= 1e-12 * energy.sqrt().max(1.0));
    }

    #[test]
    fn allocation_roundtrip(u in any_vec(5), picks in prop::sample::subsequence((0..16usize).collect::<Vec<_>>(), 5)) {
        let alloc = SubcarrierAllocation::new(16, picks).unwrap();
        let x = alloc.allocate(&u).unwrap();
        prop_assert_eq!(alloc.deallocate(x.samples()).unwrap(), u);
        let off: f64 = x.norm_sqr() - alloc.deallocate(x.samples()).unwrap().iter().map(|z| z.norm_sqr()).sum::<f64>();
        prop_assert!(off.abs() < 1e-9);
    }

    #[test]
    fn ramps_compose_by_adding_offsets(a in -0.24f64..0.24, b in -0.24f64..0.24, v in any_vec(16)) {
        let once = apply_ramp(&cfo_ramp(a + b, 16).unwrap(), &ComplexBlock::time(v.clone())).unwrap();
        let twice = apply_ramp(
            &cfo_ramp(b, 16).unwrap(),
            &apply_ramp(&cfo_ramp(a, 16).unwrap(), &ComplexBlock::time(v)).unwrap(),
        ).unwrap();
        prop_assert!(max_abs_diff(once.samples(), twice.samples()) < 1e-11);
    }
}
