//! The Painlevé V kernel through its φ-functions.
//!
//! A pair (φ1, φ2) evaluated at ξ = -u builds the kernel
//! (φ1(v)φ2(u) - φ1(u)φ2(v)) / (2πi(u - v)). Near s = 0 the pair is a Bessel
//! pair of order α+λ; for large s it is a Bessel pair of order α dressed by an
//! explicit analytic prefactor.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::opq::scaled_hard;
use crate::painleve::{lax_matrices, PainleveJet};
use crate::specfun::j_pair;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Smallest s accepted by [`phi_large_s`].
pub const LARGE_S_MIN: f64 = 100.0;

/// Relative distance below which [`kernel_from_phi`] uses the diagonal form.
pub const PHI_DIAG_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    SmallS,
    LargeS { s: f64 },
}

/// φ1, φ2 at ξ = -u with their u-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiPair {
    pub u: f64,
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub dphi1: Complex64,
    pub dphi2: Complex64,
    pub regime: Regime,
}

fn guard(what: &'static str, value: f64, scale: f64) -> Result<()> {
    if value.abs() <= 1e-14 * scale.max(1.0) {
        return Err(Error::Pole { what, value });
    }
    Ok(())
}

fn check_w_inputs(xi: f64, s: f64, jet: &PainleveJet) -> Result<()> {
    if !(xi < 0.0) {
        return Err(Error::domain("w_coefficient", format!("xi = {xi} must be negative")));
    }
    if !(s > 0.0) {
        return Err(Error::domain("w_coefficient", format!("s = {s} must be positive")));
    }
    let r1 = jet.r1;
    let scale = xi.abs() + s;
    guard("xi - s", xi - s, scale)?;
    guard("xi - s - 2 s r'", xi - s - 2.0 * s * r1, scale)?;
    guard("r'", r1, 1.0)?;
    guard("1 + 2r'", 1.0 + 2.0 * r1, 1.0)?;
    Ok(())
}

/// Coefficient of φ′ in the second-order equation, 1/ξ + 1/(ξ-s) - 1/(ξ-s-2sr′).
pub fn first_derivative_coefficient(xi: f64, s: f64, jet: &PainleveJet) -> Result<f64> {
    check_w_inputs(xi, s, jet)?;
    Ok(1.0 / xi + 1.0 / (xi - s) - 1.0 / (xi - s - 2.0 * s * jet.r1))
}

/// Coefficient W(ξ, s) of φ in φ″ + (…)φ′ + Wφ = 0, in closed form.
///
/// Only r′ and r″ of the jet enter.
pub fn w_coefficient(xi: f64, s: f64, jet: &PainleveJet, alpha: f64, lambda: f64) -> Result<f64> {
    check_w_inputs(xi, s, jet)?;
    let (r1, r2) = (jet.r1, jet.r2);
    let (a2, l2) = (alpha * alpha, lambda * lambda);
    let g = 1.0 + 2.0 * r1;
    let e = s + 2.0 * s * r1 - xi;
    let q = l2 * s * xi - l2 * xi * xi
        + r1.powi(3) * (8.0 * s * s * xi - 8.0 * s * xi * xi)
        + r1 * r1
            * (4.0 * a2 * s * s - 4.0 * a2 * s * xi + 4.0 * l2 * s * xi + 8.0 * s * s * xi
                - 12.0 * s * xi * xi
                + 4.0 * xi.powi(3))
        + r1 * (2.0 * a2 * (s - xi).powi(2) + 4.0 * l2 * s * xi - 2.0 * l2 * xi * xi
            + 2.0 * xi * (s - xi).powi(2));
    let num = -e * q + 4.0 * s * s * (s - xi) * xi * r2 * (r2 * (s - xi + 2.0 * s * r1) + 2.0 * r1 * g);
    let den = 8.0 * xi * xi * (xi - s).powi(2) * r1 * g * e;
    Ok(num / den)
}

/// W(ξ, s) from the Lax matrix A(ξ): det A - ∂A11 + A11 ∂A12 / A12.
pub fn w_coefficient_lax(xi: f64, s: f64, jet: &PainleveJet, alpha: f64, lambda: f64) -> Result<f64> {
    check_w_inputs(xi, s, jet)?;
    let lax = lax_matrices(jet, alpha, lambda)?;
    let z = Complex64::new(xi, 0.0);
    let a = lax.a_at(z);
    let da = lax.a_xi_derivative(z);
    let w = a[0][0] * a[1][1] - a[0][1] * a[1][0] - da[0][0] + a[0][0] * da[0][1] / a[0][1];
    if w.im.abs() > 1e-8 * w.re.abs().max(1.0) {
        return Err(Error::Regime(format!("W has imaginary part {}", w.im)));
    }
    Ok(w.re)
}

/// Bessel pair (-iJ_m(√u), π√u J′_m(√u)) and its u-derivative.
fn bessel_pair(m: f64, u: f64) -> Result<([Complex64; 2], [Complex64; 2])> {
    let x = u.sqrt();
    let (j, j_next) = j_pair(m, x)?;
    let jp = m * j / x - j_next;
    let v = [-I * j, Complex64::new(PI * x * jp, 0.0)];
    // (x J′)′ in u is -(1 - m²/u) J / 2
    let dv = [-I * jp / (2.0 * x), Complex64::new(-0.5 * PI * (1.0 - m * m / u) * j, 0.0)];
    Ok((v, dv))
}

/// φ-pair at s → 0: the Bessel pair of order α+λ times the constant matrix
/// (I + i(4m²+3)/8 σ₋) π^{σ₃/2}.
pub fn phi_small_s(u: f64, alpha: f64, lambda: f64) -> Result<PhiPair> {
    let m = alpha + lambda;
    if !(u > 0.0) {
        return Err(Error::domain("phi_small_s", format!("u = {u} must be positive")));
    }
    if !(m > -1.0) {
        return Err(Error::domain("phi_small_s", format!("alpha + lambda = {m} must exceed -1")));
    }
    let (v, dv) = bessel_pair(m, u)?;
    let kappa = (4.0 * m * m + 3.0) / 8.0;
    let sp = PI.sqrt();
    let phi1 = sp * v[0];
    let dphi1 = sp * dv[0];
    Ok(PhiPair {
        u,
        phi1,
        phi2: I * kappa * phi1 + v[1] / sp,
        dphi1,
        dphi2: I * kappa * dphi1 + dv[1] / sp,
        regime: Regime::SmallS,
    })
}

/// The analytic prefactor at x = u/s on the negative axis and its x-derivative:
/// [[1,0],[iλ,1]] · [[cos λθ, i sin λθ/√x], [i√x sin λθ, cos λθ]], θ = atan √x.
fn edge_prefactor(lambda: f64, x: f64) -> ([[Complex64; 2]; 2], [[Complex64; 2]; 2]) {
    let rho = x.sqrt();
    let theta = rho.atan();
    let dtheta = 1.0 / (2.0 * rho * (1.0 + x));
    let (sn, c) = (lambda * theta).sin_cos();
    let re = |v: f64| Complex64::new(v, 0.0);
    let g = [[re(c), I * sn / rho], [I * rho * sn, re(c)]];
    let dg = [
        [re(-lambda * sn * dtheta), I * (lambda * c * dtheta / rho - sn / (2.0 * rho * x))],
        [I * (sn / (2.0 * rho) + rho * lambda * c * dtheta), re(-lambda * sn * dtheta)],
    ];
    let lower = |m: [[Complex64; 2]; 2]| {
        [
            m[0],
            [I * lambda * m[0][0] + m[1][0], I * lambda * m[0][1] + m[1][1]],
        ]
    };
    (lower(g), lower(dg))
}

fn apply(m: &[[Complex64; 2]; 2], v: &[Complex64; 2]) -> [Complex64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// φ-pair for large s, built from the Bessel pair of order α with the
/// O(s^{-1/2}) correction matrix dropped.
pub fn phi_large_s(u: f64, s: f64, alpha: f64, lambda: f64) -> Result<PhiPair> {
    if !(s >= LARGE_S_MIN) {
        return Err(Error::Regime(format!("phi_large_s needs s >= {LARGE_S_MIN}, got {s}")));
    }
    if !(u > 0.0) {
        return Err(Error::domain("phi_large_s", format!("u = {u} must be positive")));
    }
    if !(alpha > -1.0) {
        return Err(Error::domain("phi_large_s", format!("alpha = {alpha} must exceed -1")));
    }
    let (b, db) = bessel_pair(alpha, u)?;
    // M1 = (I + iκ s^{-1/2} σ₋) s^{σ₃/4} π^{σ₃/2}
    let kappa = (4.0 * alpha * alpha + 3.0) / 8.0;
    let sp = PI.sqrt();
    let q = s.powf(0.25);
    let m1 = |v: &[Complex64; 2]| -> [Complex64; 2] {
        let w0 = q * sp * v[0];
        let w1 = v[1] / (q * sp);
        [w0, w1 + I * kappa / s.sqrt() * w0]
    };
    let w = m1(&b);
    let dw = m1(&db);
    let x = u / s;
    let (e, de) = edge_prefactor(lambda, x);
    let ew = apply(&e, &w);
    let dew = apply(&e, &dw);
    let d_e_w = apply(&de, &w);
    Ok(PhiPair {
        u,
        phi1: ew[0] / q,
        phi2: ew[1] * q,
        dphi1: (dew[0] + d_e_w[0] / s) / q,
        dphi2: (dew[1] + d_e_w[1] / s) * q,
        regime: Regime::LargeS { s },
    })
}

/// (φ1(v)φ2(u) - φ1(u)φ2(v)) / (2πi(u - v)), real part.
pub fn kernel_from_phi(p_u: &PhiPair, p_v: &PhiPair) -> Result<f64> {
    if p_u.regime != p_v.regime {
        return Err(Error::Regime(format!(
            "cannot combine {:?} and {:?} pairs",
            p_u.regime, p_v.regime
        )));
    }
    let (u, v) = (p_u.u, p_v.u);
    let k = if (u - v).abs() < PHI_DIAG_THRESHOLD * u.max(1.0) {
        let diag = |p: &PhiPair| -(p.dphi1 * p.phi2 - p.phi1 * p.dphi2) / (2.0 * PI * I);
        0.5 * (diag(p_u) + diag(p_v))
    } else {
        (p_v.phi1 * p_u.phi2 - p_u.phi1 * p_v.phi2) / (2.0 * PI * I * (u - v))
    };
    if k.im.abs() > 1e-10 * k.re.abs().max(1.0) {
        return Err(Error::Regime(format!("kernel has imaginary residue {}", k.im)));
    }
    Ok(k.re)
}

/// The finite-n kernel (1/4n) K_n(u/4n, v/4n; s/4n), used as the numerical
/// stand-in for the Painlevé V kernel at moderate s.
pub fn empirical_pv_kernel(alpha: f64, lambda: f64, u: f64, v: f64, s: f64, n: usize) -> Result<f64> {
    scaled_hard(alpha, lambda, u, v, n, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_kernels::bessel_kernel;
    use crate::painleve::series_start;

    #[test]
    fn small_s_reduction() {
        let (a, l) = (1.5, 0.5);
        let jet = series_start(a, l, 1e-6, 4).unwrap();
        let w = w_coefficient(-1.0, 1e-6, &jet, a, l).unwrap();
        assert!((w + 0.75).abs() < 1e-3, "{w}");
        let c = first_derivative_coefficient(-1.0, 1e-6, &jet).unwrap();
        assert!((c + 1.0).abs() < 1e-5);
    }

    #[test]
    fn closed_form_matches_matrix_route() {
        let (a, l) = (1.5, 0.5);
        for &(s, r, r1, r2) in &[(0.7, -1.9, -0.115, 0.011), (20.0, -4.0, -0.05, 0.0008), (3.0, 1.0, 0.2, -0.03)] {
            let jet = PainleveJet::new(s, r, r1, r2, 0.0);
            for &xi in &[-0.3, -2.0, -17.0] {
                let w1 = w_coefficient(xi, s, &jet, a, l).unwrap();
                let w2 = w_coefficient_lax(xi, s, &jet, a, l).unwrap();
                assert!((w1 - w2).abs() < 1e-10 * w1.abs().max(1.0), "s={s} xi={xi}: {w1} vs {w2}");
            }
        }
    }

    #[test]
    fn pole_guards() {
        let jet = PainleveJet::new(1.0, -1.0, -0.1, 0.01, 0.0);
        assert!(w_coefficient(0.5, 1.0, &jet, 1.0, 1.0).is_err());
        let flat = PainleveJet::new(1.0, -1.0, 0.0, 0.01, 0.0);
        assert!(matches!(w_coefficient(-1.0, 1.0, &flat, 1.0, 1.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn small_s_kernel_is_bessel() {
        let m = 2.0;
        let pu = phi_small_s(1.0, 1.5, 0.5).unwrap();
        let pv = phi_small_s(2.0, 1.5, 0.5).unwrap();
        let k = kernel_from_phi(&pu, &pv).unwrap();
        assert!((k - bessel_kernel(m, 1.0, 2.0).unwrap()).abs() < 1e-12);
        let kd = kernel_from_phi(&pu, &pu).unwrap();
        assert!((kd - bessel_kernel(m, 1.0, 1.0).unwrap()).abs() < 1e-12);
        assert!((kernel_from_phi(&pv, &pu).unwrap() - k).abs() < 1e-15);
    }

    #[test]
    fn small_s_magnitude() {
        let p = phi_small_s(4.0, 0.6, 0.4).unwrap();
        let j = j_pair(1.0, 2.0).unwrap().0;
        assert!((p.phi1.norm() - PI.sqrt() * j.abs()).abs() < 1e-14);
        assert_eq!(p.phi1.re, 0.0);
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-5;
        for p_of in [
            &(|u: f64| phi_small_s(u, 1.5, 0.5).unwrap()) as &dyn Fn(f64) -> PhiPair,
            &|u: f64| phi_large_s(u, 400.0, 1.5, 0.5).unwrap(),
        ] {
            let p = p_of(3.0);
            let (a, b) = (p_of(3.0 + h), p_of(3.0 - h));
            let d1 = (a.phi1 - b.phi1) / (2.0 * h);
            let d2 = (a.phi2 - b.phi2) / (2.0 * h);
            assert!((d1 - p.dphi1).norm() < 1e-7 * p.dphi1.norm().max(1.0));
            assert!((d2 - p.dphi2).norm() < 1e-7 * p.dphi2.norm().max(1.0));
        }
    }

    #[test]
    fn regimes_do_not_mix() {
        let a = phi_small_s(1.0, 1.0, 0.5).unwrap();
        let b = phi_large_s(2.0, 1e4, 1.0, 0.5).unwrap();
        assert!(kernel_from_phi(&a, &b).is_err());
        let c = phi_large_s(2.0, 2e4, 1.0, 0.5).unwrap();
        assert!(kernel_from_phi(&b, &c).is_err());
        assert!(phi_large_s(1.0, 50.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn large_s_lambda_zero_is_exact_bessel() {
        let pu = phi_large_s(1.0, 1e4, 1.5, 0.0).unwrap();
        let pv = phi_large_s(3.0, 1e4, 1.5, 0.0).unwrap();
        let k = kernel_from_phi(&pu, &pv).unwrap();
        assert!((k - bessel_kernel(1.5, 1.0, 3.0).unwrap()).abs() < 1e-12);
    }
}
