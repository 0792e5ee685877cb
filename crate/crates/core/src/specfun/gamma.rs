use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Taylor coefficients of 1/Γ(z) about z = 0, starting at z^1.
pub(crate) const RECIP_GAMMA_TAYLOR: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument x - 1
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("gamma_fn", format!("x = {x} must be positive")));
    }
    if x > 171.7 {
        return Err(Error::Overflow { func: "gamma_fn", x });
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x.fract() == 0.0 && x <= 30.0 {
        return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("ln_gamma", format!("x = {x} must be positive")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    if x < 20.0 {
        return Ok(gamma_unchecked(x).ln());
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// 1/Γ(x) for every real x, zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if x.abs() <= 0.5 {
        return x * recip_gamma_taylor(x);
    }
    if x <= 0.0 && x.fract() == 0.0 {
        return 0.0;
    }
    if x > 0.0 {
        if x > 171.7 {
            return 0.0;
        }
        return 1.0 / gamma_unchecked(x);
    }
    // reflection: 1/Γ(x) = sin(πx) Γ(1-x) / π
    let g = 1.0 - x;
    if g > 171.7 {
        let sign = (PI * x).sin().signum();
        let ln = ln_gamma(g).unwrap_or(f64::INFINITY);
        return sign * ((PI * x).sin().abs().ln() + ln - PI.ln()).exp();
    }
    sin_pi(x) * gamma_unchecked(g) / PI
}

/// 1/Γ(1 + x) for |x| ≤ 1/2 from the Taylor coefficients.
pub(crate) fn recip_gamma_taylor(x: f64) -> f64 {
    RECIP_GAMMA_TAYLOR
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * x + c)
}

fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
        let half = gamma_fn(0.5).unwrap();
        assert!((half - PI.sqrt()).abs() < 1e-14 * PI.sqrt());
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn functional_equation() {
        for &x in &[0.1, 0.37, 1.3, 2.9, 7.25, 33.3, 101.1] {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!((lhs - rhs).abs() < 2e-14 * lhs, "x = {x}");
        }
    }

    #[test]
    fn reciprocal_matches_direct() {
        for &x in &[-3.7, -2.5, -0.49, -0.2, 0.0, 0.3, 0.5, 0.51, 1.0, 2.5, 12.0] {
            let direct = if x > 0.0 {
                1.0 / gamma_fn(x).unwrap()
            } else if x == 0.0 {
                0.0
            } else {
                // reflection oracle
                (PI * x).sin() * gamma_fn(1.0 - x).unwrap() / PI
            };
            assert!((recip_gamma(x) - direct).abs() < 1e-14 * (1.0 + direct.abs()), "x = {x}");
        }
        assert_eq!(recip_gamma(-3.0), 0.0);
    }

    #[test]
    fn ln_gamma_large() {
        // ln Γ(101) = ln(100!)
        let exact: f64 = (1..=100).map(|k| (k as f64).ln()).sum();
        assert!((ln_gamma(101.0).unwrap() - exact).abs() < 1e-12 * exact);
    }
}
