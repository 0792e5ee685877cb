use std::f64::consts::PI;

use super::bessel::{bessel_k, j_pair};
use super::gamma::recip_gamma;

const SERIES_MAX: f64 = 2.5;

fn maclaurin_constants() -> (f64, f64) {
    // Ai(0) = 3^{-2/3}/Γ(2/3), -Ai'(0) = 3^{-1/3}/Γ(1/3)
    let c1 = 3f64.powf(-2.0 / 3.0) * recip_gamma(2.0 / 3.0);
    let c2 = 3f64.powf(-1.0 / 3.0) * recip_gamma(1.0 / 3.0);
    (c1, c2)
}

/// (Ai, Ai') from the Maclaurin series f, g.
fn maclaurin(x: f64) -> (f64, f64) {
    let (c1, c2) = maclaurin_constants();
    let x3 = x * x * x;
    let (mut f, mut fp, mut g, mut gp) = (1.0, 0.0, x, 1.0);
    let mut a = 1.0; // coefficient of x^{3k} in f
    let mut b = 1.0; // coefficient of x^{3k+1} in g
    let mut xp = 1.0; // x^{3k}
    for k in 0..60 {
        let kf = k as f64;
        a /= (3.0 * kf + 2.0) * (3.0 * kf + 3.0);
        b /= (3.0 * kf + 3.0) * (3.0 * kf + 4.0);
        let xnext = xp * x3;
        let fk = a * xnext;
        let gk = b * xnext * x;
        f += fk;
        fp += 3.0 * (kf + 1.0) * a * xp * x * x;
        g += gk;
        gp += (3.0 * kf + 4.0) * b * xnext;
        xp = xnext;
        if fk.abs() < 1e-18 * f.abs().max(1.0) && gk.abs() < 1e-18 * g.abs().max(1.0) {
            break;
        }
    }
    (c1 * f - c2 * g, c1 * fp - c2 * gp)
}

/// Ai(x) for real x.
pub fn airy_ai(x: f64) -> f64 {
    airy_pair(x).0
}

/// Ai'(x) for real x.
pub fn airy_ai_prime(x: f64) -> f64 {
    airy_pair(x).1
}

/// (Ai(x), Ai'(x)).
pub fn airy_pair(x: f64) -> (f64, f64) {
    if x.abs() <= SERIES_MAX {
        return maclaurin(x);
    }
    let ax = x.abs();
    let zeta = 2.0 / 3.0 * ax * ax.sqrt();
    if x > 0.0 {
        let k13 = bessel_k(1.0 / 3.0, zeta).unwrap_or(0.0);
        let k23 = bessel_k(2.0 / 3.0, zeta).unwrap_or(0.0);
        let ai = (x / 3.0).sqrt() * k13 / PI;
        let aip = -x * k23 / (PI * 3f64.sqrt());
        (ai, aip)
    } else {
        let (jp13, _) = j_pair(1.0 / 3.0, zeta).expect("positive argument");
        let (jm13, _) = j_pair(-1.0 / 3.0, zeta).expect("positive argument");
        let (jp23, _) = j_pair(2.0 / 3.0, zeta).expect("positive argument");
        let (jm23, _) = j_pair(-2.0 / 3.0, zeta).expect("positive argument");
        let ai = ax.sqrt() / 3.0 * (jp13 + jm13);
        let aip = ax / 3.0 * (jp23 - jm23);
        (ai, aip)
    }
}
