use astro_float::{BigFloat, Consts, RoundingMode};
use proptest::prelude::*;

use pvkernel::specfun::{
    airy_ai, airy_ai_prime, bessel_i, bessel_j, bessel_j_prime, bessel_k, bessel_k_connection,
    bessel_k_scaled_asymptotic, gamma_fn,
};

const P: usize = 640;
const RM: RoundingMode = RoundingMode::ToEven;

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, P)
}

fn to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    x.format(astro_float::Radix::Dec, RM, cc)
        .unwrap()
        .parse()
        .unwrap()
}

/// Γ(x) by Spouge's formula with a = 60; relative error far below 1e-40.
fn gamma_big(x: &BigFloat, cc: &mut Consts) -> BigFloat {
    let one = big(1.0);
    if x < &one {
        return gamma_big(&x.add(&one, P, RM), cc).div(x, P, RM);
    }
    let a = 60usize;
    let z = x.sub(&one, P, RM);
    let af = big(a as f64);
    let two_pi = cc.pi(P, RM).mul(&big(2.0), P, RM);
    let mut sum = two_pi.sqrt(P, RM);
    let mut fact = big(1.0);
    for k in 1..a {
        if k > 1 {
            fact = fact.mul(&big((k - 1) as f64), P, RM);
        }
        let ak = big((a - k) as f64);
        let mut ck = ak
            .pow(&big(k as f64 - 0.5), P, RM, cc)
            .mul(&ak.exp(P, RM, cc), P, RM)
            .div(&fact, P, RM);
        if k % 2 == 0 {
            ck = ck.neg();
        }
        sum = sum.add(&ck.div(&z.add(&big(k as f64), P, RM), P, RM), P, RM);
    }
    let za = z.add(&af, P, RM);
    za.pow(&z.add(&big(0.5), P, RM), P, RM, cc)
        .mul(&za.neg().exp(P, RM, cc), P, RM)
        .mul(&sum, P, RM)
}

/// I_ν(x) by its ascending series in 640-bit arithmetic.
fn bessel_i_big(nu: f64, x: f64, cc: &mut Consts) -> BigFloat {
    let q = big(0.25 * x * x);
    let nu_big = big(nu);
    let mut term = big(1.0).div(&gamma_big(&nu_big.add(&big(1.0), P, RM), cc), P, RM);
    let mut sum = term.clone();
    for k in 1..400 {
        let kb = big(k as f64);
        let d = kb.mul(&nu_big.add(&kb, P, RM), P, RM);
        term = term.mul(&q, P, RM).div(&d, P, RM);
        sum = sum.add(&term, P, RM);
    }
    big(0.5 * x).pow(&big(nu), P, RM, cc).mul(&sum, P, RM)
}

fn k_connection_big(nu: f64, x: f64, cc: &mut Consts) -> f64 {
    let diff = bessel_i_big(-nu, x, cc).sub(&bessel_i_big(nu, x, cc), P, RM);
    let pi = cc.pi(P, RM);
    let sin = pi.mul(&big(nu), P, RM).sin(P, RM, cc);
    to_f64(&pi.mul(&diff, P, RM).div(&sin.mul(&big(2.0), P, RM), P, RM), cc)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn spouge_oracle_reproduces_known_gammas() {
    let mut cc = Consts::new().unwrap();
    let sqrt_pi = std::f64::consts::PI.sqrt();
    assert!(rel(to_f64(&gamma_big(&big(0.5), &mut cc), &mut cc), sqrt_pi) < 1e-15);
    assert!(rel(to_f64(&gamma_big(&big(5.0), &mut cc), &mut cc), 24.0) < 1e-15);
    for &x in &[0.3, 1.7, 3.25] {
        let g = to_f64(&gamma_big(&big(x), &mut cc), &mut cc);
        assert!(rel(gamma_fn(x).unwrap(), g) < 1e-14, "x = {x}");
    }
}

#[test]
fn connection_formula_matches_asymptotic_series_at_thirty() {
    let mut cc = Consts::new().unwrap();
    let x = 30.0;
    for &nu in &[0.3, 0.5, 1.7, 2.25] {
        let k_big = k_connection_big(nu, x, &mut cc);
        let k_asym = bessel_k_scaled_asymptotic(nu, x) * (-x).exp();
        assert!(rel(k_asym, k_big) < 1e-8, "nu = {nu}: {k_asym:e} vs {k_big:e}");
        assert!(rel(bessel_k(nu, x).unwrap(), k_big) < 1e-10, "nu = {nu}");
    }
}

#[test]
fn double_connection_formula_at_moderate_argument() {
    let mut cc = Consts::new().unwrap();
    for &nu in &[0.3, 0.5, 1.7] {
        let k_big = k_connection_big(nu, 1.0, &mut cc);
        assert!(rel(bessel_k_connection(nu, 1.0).unwrap(), k_big) < 1e-12, "nu = {nu}");
    }
}

#[test]
fn modified_bessel_i_against_extended_series() {
    let mut cc = Consts::new().unwrap();
    for &nu in &[0.0, 0.4, 1.5, 3.0] {
        for &x in &[0.5, 5.0, 20.0, 45.0] {
            let want = to_f64(&bessel_i_big(nu, x, &mut cc), &mut cc);
            let got = bessel_i(nu, x).unwrap();
            assert!(rel(got, want) < 1e-12, "I_{nu}({x}): {got:e} vs {want:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn three_term_recurrence(nu in 0.0f64..5.0, x in 0.1f64..30.0) {
        // J_{ν-1} with ν - 1 < 0 is reached through ν + 1 instead
        let (lo, mid, hi) = if nu >= 1.0 {
            (bessel_j(nu - 1.0, x).unwrap(), bessel_j(nu, x).unwrap(), bessel_j(nu + 1.0, x).unwrap())
        } else {
            (bessel_j(nu, x).unwrap(), bessel_j(nu + 1.0, x).unwrap(), bessel_j(nu + 2.0, x).unwrap())
        };
        let order = if nu >= 1.0 { nu } else { nu + 1.0 };
        let lhs = lo + hi;
        let rhs = 2.0 * order / x * mid;
        let scale = lo.abs().max(hi.abs()).max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-9 * scale, "{lhs:e} vs {rhs:e}");
    }

    #[test]
    fn wronskian_of_modified_bessel(nu in 0.0f64..4.0, x in 0.1f64..25.0) {
        // I_ν K_{ν+1} + I_{ν+1} K_ν = 1/x
        let w = bessel_i(nu, x).unwrap() * bessel_k(nu + 1.0, x).unwrap()
            + bessel_i(nu + 1.0, x).unwrap() * bessel_k(nu, x).unwrap();
        prop_assert!((w * x - 1.0).abs() < 1e-11, "{}", w * x);
    }

    #[test]
    fn bessel_derivative_matches_finite_difference(nu in 0.0f64..5.0, x in 0.5f64..30.0) {
        let h = 1e-5 * x.max(1.0);
        let fd = (bessel_j(nu, x + h).unwrap() - bessel_j(nu, x - h).unwrap()) / (2.0 * h);
        prop_assert!((fd - bessel_j_prime(nu, x).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn airy_derivative_matches_finite_difference(x in -8.0f64..8.0) {
        let h = 1e-5;
        let fd = (airy_ai(x + h) - airy_ai(x - h)) / (2.0 * h);
        prop_assert!((fd - airy_ai_prime(x)).abs() < 1e-6);
    }
}

#[test]
fn airy_equation_residual() {
    let h = 1e-3;
    for k in 0..=200 {
        let x = -5.0 + 0.05 * k as f64;
        let second = (airy_ai(x + h) - 2.0 * airy_ai(x) + airy_ai(x - h)) / (h * h);
        let res = second - x * airy_ai(x);
        assert!(res.abs() < 1e-6, "x = {x}: {res:e}");
    }
}
