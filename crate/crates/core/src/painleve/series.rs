//! Power-series start near the singular point s = 0.
//!
//! Substituting r = Σ r_k s^k into the third-order equation, r_k first appears
//! in the coefficient of s^{k-1}, linearly, with factor
//! P(k) = 4αλk(1 - (k-1)²/m²), m = α + λ. So r_k = -E_k / P(k), where E_k is
//! that coefficient computed with r_k = 0. P vanishes at k = m + 1: s^{m+1} is
//! the free direction of the solution family, and for integer m the expansion
//! needs an extra A s^{m+1} ln s term with A = -E_{m+1} / P'(m+1).

use super::jet::{initial_data, third_derivative, PainleveJet};
use crate::error::{Error, Result};

pub const S0_RANGE: (f64, f64) = (1e-6, 1e-2);
pub const ORDER_RANGE: (usize, usize) = (2, 6);

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesStart {
    pub alpha: f64,
    pub lambda: f64,
    /// r_0 ..= r_K.
    pub coeffs: Vec<f64>,
    /// Exponent of the free mode, m + 1.
    pub mode_exponent: f64,
    /// Coefficient of s^{m+1} ln s; zero unless m is an integer.
    pub log_coeff: f64,
}

fn integer_order(m: f64) -> Option<usize> {
    let k = m.round();
    ((m - k).abs() < 1e-12 && k >= 1.0).then_some(k as usize)
}

/// Linear coefficient of r_k in the s^{k-1} term.
pub fn leading_factor(alpha: f64, lambda: f64, k: f64) -> f64 {
    let m = alpha + lambda;
    4.0 * alpha * lambda * k * (1.0 - (k - 1.0).powi(2) / (m * m))
}

impl SeriesStart {
    pub fn new(alpha: f64, lambda: f64, order: usize) -> Result<Self> {
        if !(ORDER_RANGE.0..=ORDER_RANGE.1).contains(&order) {
            return Err(Error::domain("series_start", format!("order {order} outside [2, 6]")));
        }
        let d = initial_data(alpha, lambda)?;
        let m = alpha + lambda;
        let mut coeffs = vec![d.r0, d.r0p];
        if lambda == 0.0 {
            return Ok(Self {
                alpha,
                lambda,
                coeffs,
                mode_exponent: m + 1.0,
                log_coeff: 0.0,
            });
        }
        let resonant = integer_order(m);
        let top = match resonant {
            Some(mi) => order.min(mi),
            None => order,
        };
        let scale = 4.0 * (alpha * lambda).abs();
        for k in 2..=top {
            coeffs.push(0.0);
            let e = lowest_coefficient(&coeffs, k - 1, alpha, lambda);
            let p = leading_factor(alpha, lambda, k as f64);
            if p.abs() < 1e-10 * scale * k as f64 {
                return Err(Error::SeriesDegenerate { order: k });
            }
            coeffs[k] = -e / p;
        }
        let mut log_coeff = 0.0;
        if let Some(mi) = resonant {
            if mi <= order {
                let mut padded = coeffs.clone();
                padded.push(0.0);
                let e = lowest_coefficient(&padded, mi, alpha, lambda);
                let dp = -8.0 * alpha * lambda * (m + 1.0) / m;
                log_coeff = -e / dp;
            }
        }
        Ok(Self {
            alpha,
            lambda,
            coeffs,
            mode_exponent: m + 1.0,
            log_coeff,
        })
    }

    /// (r, r′, r″) at s with free-mode amplitude c.
    pub fn eval(&self, s: f64, c: f64) -> (f64, f64, f64) {
        let (mut r, mut r1, mut r2) = (0.0, 0.0, 0.0);
        for (k, &ck) in self.coeffs.iter().enumerate() {
            let kf = k as f64;
            r += ck * s.powi(k as i32);
            if k >= 1 {
                r1 += kf * ck * s.powi(k as i32 - 1);
            }
            if k >= 2 {
                r2 += kf * (kf - 1.0) * ck * s.powi(k as i32 - 2);
            }
        }
        if self.lambda != 0.0 {
            let mu = self.mode_exponent;
            let a = self.log_coeff;
            let amp = c + a * s.ln();
            r += amp * s.powf(mu);
            r1 += (amp * mu + a) * s.powf(mu - 1.0);
            r2 += (amp * mu * (mu - 1.0) + a * (2.0 * mu - 1.0)) * s.powf(mu - 2.0);
        }
        (r, r1, r2)
    }

    /// Jet at s with r‴ taken from the differential equation.
    pub fn jet(&self, s: f64, c: f64) -> Result<PainleveJet> {
        let (r, r1, r2) = self.eval(s, c);
        if self.lambda == 0.0 {
            return Ok(PainleveJet::new(s, r, 0.0, 0.0, 0.0));
        }
        let r3 = third_derivative(s, r1, r2, self.alpha, self.lambda)?;
        Ok(PainleveJet::new(s, r, r1, r2, r3))
    }
}

/// Jet at s0 from the series with the free mode switched off.
pub fn series_start(alpha: f64, lambda: f64, s0: f64, order: usize) -> Result<PainleveJet> {
    if !(s0 >= S0_RANGE.0 && s0 <= S0_RANGE.1) {
        return Err(Error::domain("series_start", format!("s0 = {s0} outside [1e-6, 1e-2]")));
    }
    SeriesStart::new(alpha, lambda, order)?.jet(s0, 0.0)
}

/// Coefficient of s^deg in the left side of the third-order equation for the
/// polynomial r = Σ coeffs[k] s^k, truncated at degree deg.
pub(crate) fn lowest_coefficient(coeffs: &[f64], deg: usize, alpha: f64, lambda: f64) -> f64 {
    let n = deg + 1;
    let mut p = coeffs.to_vec();
    p.resize(n + 3, 0.0);
    let d1 = derivative(&p);
    let d2 = derivative(&d1);
    let d3 = derivative(&d2);
    let trunc = |v: &[f64]| -> Vec<f64> {
        let mut out = v.to_vec();
        out.resize(n, 0.0);
        out
    };
    let (d1, d2, d3) = (trunc(&d1), trunc(&d2), trunc(&d3));
    let mut g = d1.iter().map(|x| 2.0 * x).collect::<Vec<_>>();
    g[0] += 1.0;
    let mut h = d1.iter().map(|x| 4.0 * x).collect::<Vec<_>>();
    h[0] += 1.0;

    let d1g = mul(&d1, &g, n);
    let t1 = mul(&d1g, &d3, n);
    let t2 = mul(&mul(&h, &d2, n), &d2, n);
    let t3 = mul(&d1g, &d2, n);
    let t4 = mul(&d1g, &d1g, n);
    let t5 = mul(&g, &g, n);
    let t6 = mul(&d1, &d1, n);

    let (a2, l2) = (alpha * alpha, lambda * lambda);
    let at = |v: &[f64], shift: usize| -> f64 {
        if deg >= shift {
            v[deg - shift]
        } else {
            0.0
        }
    };
    8.0 * at(&t1, 2) - 4.0 * at(&t2, 2) + 8.0 * at(&t3, 1) - 4.0 * at(&t4, 1) + l2 * at(&t5, 0)
        - 4.0 * a2 * at(&t6, 0)
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

fn mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, x) in a.iter().enumerate().take(n) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}
