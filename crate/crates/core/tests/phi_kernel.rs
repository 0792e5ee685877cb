use proptest::prelude::*;

use pvkernel::limit_kernels::bessel_kernel;
use pvkernel::painleve::{series_start, PainleveJet};
use pvkernel::phi_kernel::{
    empirical_pv_kernel, first_derivative_coefficient, kernel_from_phi, phi_large_s, phi_small_s, w_coefficient,
    w_coefficient_lax,
};

const ALPHA: f64 = 1.5;
const LAMBDA: f64 = 0.5;

/// φ1″ + c φ1′ + W φ1 in ξ = -u, with φ1″ by central differences of φ1′.
fn phi1_residual(u: f64, s: f64) -> f64 {
    let jet = series_start(ALPHA, LAMBDA, s, 4).unwrap();
    let h = 1e-4;
    let p = phi_small_s(u, ALPHA, LAMBDA).unwrap();
    let plus = phi_small_s(u + h, ALPHA, LAMBDA).unwrap();
    let minus = phi_small_s(u - h, ALPHA, LAMBDA).unwrap();
    let second = (plus.dphi1 - minus.dphi1) / (2.0 * h);
    let c = first_derivative_coefficient(-u, s, &jet).unwrap();
    let w = w_coefficient(-u, s, &jet, ALPHA, LAMBDA).unwrap();
    ((second - c * p.dphi1 + w * p.phi1) / p.phi1.norm()).norm()
}

#[test]
fn small_s_pair_solves_the_limiting_equation() {
    for &u in &[0.5, 2.0, 7.0] {
        let coarse = phi1_residual(u, 1e-4);
        let fine = phi1_residual(u, 1e-6);
        assert!(coarse < 1e-3, "u = {u}: {coarse:e}");
        assert!(fine < coarse / 50.0, "u = {u}: {coarse:e} then {fine:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_w_matches_lax_route(
        xi in -20.0f64..-0.1,
        s in 0.1f64..20.0,
        r in -5.0f64..2.0,
        r1 in -0.45f64..-0.05,
        r2 in -1.0f64..1.0,
    ) {
        let jet = PainleveJet::new(s, r, r1, r2, 0.0);
        let a = w_coefficient(xi, s, &jet, ALPHA, LAMBDA).unwrap();
        let b = w_coefficient_lax(xi, s, &jet, ALPHA, LAMBDA).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn large_s_kernel_is_real_and_symmetric(u in 0.1f64..10.0, v in 0.1f64..10.0, s in 100.0f64..1e6) {
        let pu = phi_large_s(u, s, ALPHA, LAMBDA).unwrap();
        let pv = phi_large_s(v, s, ALPHA, LAMBDA).unwrap();
        let k = kernel_from_phi(&pu, &pv).unwrap();
        let k_swap = kernel_from_phi(&pv, &pu).unwrap();
        prop_assert!((k - k_swap).abs() < 1e-12 * k.abs().max(1.0));
    }
}

fn large_s_error(s: f64) -> f64 {
    let mut err: f64 = 0.0;
    for &u in &[1.0, 2.0, 4.0] {
        for &v in &[1.0, 3.0] {
            let pu = phi_large_s(u, s, ALPHA, LAMBDA).unwrap();
            let pv = phi_large_s(v, s, ALPHA, LAMBDA).unwrap();
            let k = kernel_from_phi(&pu, &pv).unwrap();
            err = err.max((k - bessel_kernel(ALPHA, u, v).unwrap()).abs());
        }
    }
    err
}

#[test]
fn large_s_error_decays_like_inverse_square_root() {
    let errs: Vec<f64> = [1e4, 1e6, 1e8].iter().map(|&s| large_s_error(s)).collect();
    for w in errs.windows(2) {
        let ratio = w[1] / w[0];
        assert!((0.08..0.12).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn zero_lambda_regimes_agree() {
    for &(u, v) in &[(1.0, 1.0), (0.5, 3.0), (6.0, 2.0)] {
        let small = kernel_from_phi(&phi_small_s(u, ALPHA, 0.0).unwrap(), &phi_small_s(v, ALPHA, 0.0).unwrap()).unwrap();
        for &s in &[100.0, 1e5] {
            let large =
                kernel_from_phi(&phi_large_s(u, s, ALPHA, 0.0).unwrap(), &phi_large_s(v, s, ALPHA, 0.0).unwrap()).unwrap();
            assert!((small - large).abs() < 1e-12, "({u}, {v}), s = {s}");
        }
    }
}

#[test]
fn small_s_route_matches_finite_n_kernel() {
    let grid = [1.0, 2.0, 4.0, 8.0];
    for &u in &grid {
        for &v in &grid {
            let phi = kernel_from_phi(&phi_small_s(u, ALPHA, LAMBDA).unwrap(), &phi_small_s(v, ALPHA, LAMBDA).unwrap())
                .unwrap();
            let emp = empirical_pv_kernel(ALPHA, LAMBDA, u, v, 1e-3, 64).unwrap();
            assert!((phi - emp).abs() < 5e-2, "({u}, {v}): {phi} vs {emp}");
        }
    }
}

#[test]
fn argument_checks() {
    assert!(phi_small_s(-1.0, ALPHA, LAMBDA).is_err());
    assert!(phi_small_s(1.0, -0.8, -0.5).is_err());
    assert!(phi_large_s(1.0, 99.0, ALPHA, LAMBDA).is_err());
    assert!(phi_large_s(1.0, 1e3, -1.0, LAMBDA).is_err());
    let jet = PainleveJet::new(1.0, -1.0, -0.1, 0.0, 0.0);
    assert!(w_coefficient(0.0, 1.0, &jet, ALPHA, LAMBDA).is_err());
}

#[test]
fn small_s_pair_solves_modified_bessel_equation_exactly() {
    // φ″ + φ′/ξ - (1/(4ξ) + m²/(4ξ²)) φ = 0 in ξ = -u
    let m = ALPHA + LAMBDA;
    let h = 1e-4;
    for &u in &[0.3, 1.0, 2.5, 6.0, 15.0] {
        let xi = -u;
        let p = phi_small_s(u, ALPHA, LAMBDA).unwrap();
        let plus = phi_small_s(u + h, ALPHA, LAMBDA).unwrap();
        let minus = phi_small_s(u - h, ALPHA, LAMBDA).unwrap();
        let second = (plus.dphi1 - minus.dphi1) / (2.0 * h);
        let w0 = -(1.0 / (4.0 * xi) + m * m / (4.0 * xi * xi));
        let res = (second - p.dphi1 / xi + w0 * p.phi1).norm() / p.phi1.norm();
        assert!(res < 1e-8, "u = {u}: {res:e}");
    }
}
