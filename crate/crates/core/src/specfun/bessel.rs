//! Bessel functions of real order ν > -1 and real argument.
//!
//! `J` uses the power series for small argument and Miller's backward
//! recurrence normalised by the Neumann sum otherwise. `I` uses the series up
//! to [`I_SERIES_MAX`] and the Hankel expansion beyond. `K` uses Temme's series
//! for x < 2 and Steed's continued fraction for x ≥ 2, both on the reduced order
//! μ ∈ [-1/2, 1/2] followed by forward recurrence, so integer orders need no
//! special treatment.

use std::f64::consts::PI;

use super::gamma::{recip_gamma, recip_gamma_taylor, RECIP_GAMMA_TAYLOR};
use crate::error::{Error, Result};

const EPS: f64 = 1e-17;
const J_SERIES_MAX: f64 = 4.0;
pub(crate) const I_SERIES_MAX: f64 = 25.0;
const EXP_BUDGET: f64 = 700.0;
const MAX_ITER: usize = 100_000;

fn check_order(func: &'static str, nu: f64) -> Result<()> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(Error::domain(func, format!("order {nu} must exceed -1")));
    }
    Ok(())
}

fn check_arg(func: &'static str, x: f64, strict: bool) -> Result<()> {
    let bad = if strict { !(x > 0.0) } else { !(x >= 0.0) };
    if bad || !x.is_finite() {
        return Err(Error::domain(func, format!("argument {x} out of range")));
    }
    Ok(())
}

/// J_ν(x).
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_order("bessel_j", nu)?;
    check_arg("bessel_j", x, false)?;
    Ok(j_pair(nu, x)?.0)
}

/// J'_ν(x) = (ν/x) J_ν(x) - J_{ν+1}(x).
pub fn bessel_j_prime(nu: f64, x: f64) -> Result<f64> {
    check_order("bessel_j_prime", nu)?;
    check_arg("bessel_j_prime", x, true)?;
    let (j, j1) = j_pair(nu, x)?;
    Ok(nu / x * j - j1)
}

/// (J_ν(x), J_{ν+1}(x)). Shared by callers that need both the value and the
/// derivative.
pub fn j_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    if x == 0.0 {
        if nu < 0.0 {
            return Err(Error::domain("bessel_j", "J_nu(0) is infinite for nu < 0"));
        }
        let j0 = if nu == 0.0 { 1.0 } else { 0.0 };
        return Ok((j0, 0.0));
    }
    if x <= J_SERIES_MAX {
        Ok((j_series(nu, x), j_series(nu + 1.0, x)))
    } else {
        Ok(j_miller(nu, x))
    }
}

fn j_series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = recip_gamma(nu + 1.0);
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= EPS * sum.abs() {
            break;
        }
    }
    (0.5 * x).powf(nu) * sum
}

fn j_miller(nu: f64, x: f64) -> (f64, f64) {
    // start index, even distance from nu
    let mut top = (x + 30.0 + (40.0 * x).sqrt()).ceil() as usize;
    if top % 2 == 1 {
        top += 1;
    }
    let mut j_next = 0.0; // J_{nu+k+1}
    let mut j_cur = 1e-300; // J_{nu+k}
    let mut sum = 0.0;
    let mut j1 = 0.0;
    // normalisation weights (nu+2k) Γ(nu+k)/(k! Γ(nu+1)), built upward
    let weights: Vec<f64> = {
        let half = top / 2;
        let mut w = vec![0.0; half + 1];
        w[0] = 1.0;
        let mut g = 1.0;
        for k in 1..=half {
            let kf = k as f64;
            if k > 1 {
                g *= (nu + kf - 1.0) / kf;
            }
            w[k] = (nu + 2.0 * kf) * g;
        }
        w
    };
    for k in (0..=top).rev() {
        if k % 2 == 0 {
            sum += weights[k / 2] * j_cur;
        }
        if k == 0 {
            break;
        }
        let mu = nu + k as f64;
        let j_prev = 2.0 * mu / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        if k == 1 {
            j1 = j_next;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            sum *= 1e-250;
            j1 *= 1e-250;
        }
    }
    let norm = (0.5 * x).powf(nu) * recip_gamma(nu + 1.0) / sum;
    (j_cur * norm, j1 * norm)
}

/// I_ν(x).
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    check_order("bessel_i", nu)?;
    check_arg("bessel_i", x, false)?;
    if x > EXP_BUDGET {
        return Err(Error::Overflow { func: "bessel_i", x });
    }
    if x <= I_SERIES_MAX {
        Ok(i_series(nu, x))
    } else {
        Ok(i_scaled_asymptotic(nu, x) * x.exp())
    }
}

/// e^{-x} I_ν(x), finite for every x ≥ 0.
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    check_order("bessel_i_scaled", nu)?;
    check_arg("bessel_i_scaled", x, false)?;
    if x <= I_SERIES_MAX {
        Ok(i_series(nu, x) * (-x).exp())
    } else {
        Ok(i_scaled_asymptotic(nu, x))
    }
}

/// Ascending series; valid for any real order (terms with 1/Γ at poles vanish).
pub(crate) fn i_series(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let q = 0.25 * x * x;
    let mut sum = 0.0;
    let mut k = 0usize;
    // leading terms may hit poles of Γ(nu+k+1) when nu is a negative integer
    let mut term = recip_gamma(nu + 1.0);
    loop {
        sum += term;
        k += 1;
        let kf = k as f64;
        let denom = nu + kf;
        term = if denom == 0.0 || term == 0.0 {
            q.powi(k as i32) * recip_gamma(nu + kf + 1.0) / factorial(k)
        } else {
            term * q / (kf * denom)
        };
        if k > 5 && term.abs() <= EPS * sum.abs() {
            break;
        }
        if k > 500 {
            break;
        }
    }
    (0.5 * x).powf(nu) * sum
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

/// e^{-x} I_ν(x) ~ (2πx)^{-1/2} Σ (-1)^k a_k(ν) x^{-k}.
fn i_scaled_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        sum += term;
        if term.abs() <= EPS * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// e^{x} K_ν(x) ~ (π/2x)^{1/2} Σ a_k(ν) x^{-k}.
pub fn bessel_k_scaled_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        sum += term;
        if term.abs() <= EPS * sum.abs() {
            break;
        }
    }
    sum * (PI / (2.0 * x)).sqrt()
}

/// K_ν(x). Underflows to zero for very large x; see [`bessel_k_scaled`].
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    let scaled = bessel_k_scaled(nu, x)?;
    Ok(scaled * (-x).exp())
}

/// e^{x} K_ν(x).
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    check_order("bessel_k", nu)?;
    check_arg("bessel_k", x, true)?;
    let nu = nu.abs();
    let steps = (nu + 0.5).floor();
    let mu = nu - steps;
    let (mut k_mu, mut k_mu1) = if x < 2.0 {
        let (a, b) = k_temme(mu, x);
        (a * x.exp(), b * x.exp())
    } else {
        k_steed(mu, x)
    };
    for i in 1..=steps as usize {
        let next = (mu + i as f64) * 2.0 / x * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
    }
    Ok(k_mu)
}

/// Temme's series for (K_μ, K_{μ+1}), |μ| ≤ 1/2, x < 2.
fn k_temme(mu: f64, x: f64) -> (f64, f64) {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < 1e-15 { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < 1e-15 { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum, sum1 * 2.0 / x)
}

/// gam1 = (1/Γ(1-μ) - 1/Γ(1+μ))/(2μ), gam2 = (1/Γ(1-μ) + 1/Γ(1+μ))/2,
/// plus 1/Γ(1+μ) and 1/Γ(1-μ).
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let m2 = mu * mu;
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    // 1/Γ(1+μ) = Σ c_{k} μ^{k-1}; odd k give the even part, even k the odd part
    for (idx, c) in RECIP_GAMMA_TAYLOR.iter().enumerate().rev() {
        let k = idx + 1;
        if k % 2 == 1 {
            gam2 = gam2 * m2 + c;
        } else {
            gam1 = gam1 * m2 + c;
        }
    }
    gam1 = -gam1;
    (gam1, gam2, recip_gamma_taylor(mu), recip_gamma_taylor(-mu))
}

/// Steed's CF2 for e^{x}(K_μ, K_{μ+1}), x ≥ 2.
fn k_steed(mu: f64, x: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let kmu = (PI / (2.0 * x)).sqrt() / s;
    let k1 = kmu * (mu + x + 0.5 - h) / x;
    (kmu, k1)
}

/// K_ν from the connection formula π(I_{-ν} - I_ν)/(2 sin νπ), non-integer ν.
///
/// Loses accuracy like e^{2x}; use it only as a cross-check at moderate x.
pub fn bessel_k_connection(nu: f64, x: f64) -> Result<f64> {
    check_arg("bessel_k_connection", x, true)?;
    if nu.fract() == 0.0 {
        return Err(Error::domain("bessel_k_connection", "integer order needs the limit form"));
    }
    if x > I_SERIES_MAX {
        return Err(Error::domain("bessel_k_connection", "argument beyond the series range"));
    }
    Ok(PI * (i_series(-nu, x) - i_series(nu, x)) / (2.0 * (nu * PI).sin()))
}
