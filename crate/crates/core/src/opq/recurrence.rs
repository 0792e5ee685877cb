use std::fmt::Write as _;

use super::quadrature::{discretize, QuadratureRule};
use super::weight::WeightParams;
use crate::error::{Error, Result};
use crate::limit_kernels::fmt17;
use crate::specfun::DoubleDouble;

/// Largest degree supported per precision mode.
pub const MAX_DEGREE_DOUBLE: usize = 256;
pub const MAX_DEGREE_EXTENDED: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    Double,
    /// Double-double accumulation of the Stieltjes inner products.
    Extended,
}

impl Precision {
    pub fn max_degree(self) -> usize {
        match self {
            Precision::Double => MAX_DEGREE_DOUBLE,
            Precision::Extended => MAX_DEGREE_EXTENDED,
        }
    }
}

/// Monic recurrence π_{k+1} = (x - a_k) π_k - b_k π_{k-1} with squared norms h_k.
///
/// `a[k]` for k = 0..=n, `b[k]` for k = 1..=n with `b[0] = h_0` by convention,
/// `ln_h[k] = ln h_k`. The norms overflow double range for moderate n, so only
/// their logarithms are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub ln_h: Vec<f64>,
    pub params: WeightParams,
}

impl RecurrenceTable {
    /// Number of polynomials π_0..π_{depth-1} the table can generate, plus one.
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    pub fn h(&self, k: usize) -> f64 {
        self.ln_h[k].exp()
    }

    /// CSV `k,a,b,h` with `#` header lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let _ = writeln!(out, "# alpha={} lambda={} t={}", fmt17(p.alpha()), fmt17(p.lambda()), fmt17(p.t()));
        out.push_str("# monic recurrence pi_{k+1} = (x - a_k) pi_k - b_k pi_{k-1}\n");
        out.push_str("# b_0 holds h_0; h_k is the squared norm of pi_k and may exceed double range\n");
        out.push_str("k,a,b,h\n");
        for k in 0..self.a.len() {
            let _ = writeln!(out, "{},{},{},{}", k, fmt17(self.a[k]), fmt17(self.b[k]), fmt_ln(self.ln_h[k]));
        }
        out
    }
}

/// Formats e^{ln_x} with 17 significant digits without overflowing.
fn fmt_ln(ln_x: f64) -> String {
    let x = ln_x.exp();
    if x.is_finite() && x > 1e-300 {
        return fmt17(x);
    }
    let l10 = ln_x / std::f64::consts::LN_10;
    let mut exp = l10.floor();
    let mut mant = 10f64.powf(l10 - exp);
    if mant >= 10.0 {
        mant /= 10.0;
        exp += 1.0;
    }
    format!("{mant:.16}e{exp}")
}

/// Gauss-Laguerre order (the tail order when the rule is composite) used for
/// a table of degree `n` at the given t.
pub fn default_quadrature_order(n: usize, t: f64) -> usize {
    if t < 1e-2 {
        (8 * n).max(512)
    } else {
        (4 * n).max(256)
    }
}

/// Recurrence coefficients for degrees 0..=n by the discretised Stieltjes
/// procedure on the default quadrature.
pub fn build_recurrence(n: usize, p: &WeightParams) -> Result<RecurrenceTable> {
    build_recurrence_with(n, p, default_quadrature_order(n, p.t()), Precision::Double)
}

pub fn build_recurrence_with(
    n: usize,
    p: &WeightParams,
    quad_order: usize,
    precision: Precision,
) -> Result<RecurrenceTable> {
    if n > precision.max_degree() {
        return Err(Error::domain(
            "build_recurrence",
            format!("degree {n} exceeds the cap {} for {precision:?}", precision.max_degree()),
        ));
    }
    if quad_order <= n + 1 {
        return Err(Error::domain("build_recurrence", "quadrature order must exceed n + 1"));
    }
    let rule = discretize(p, n, quad_order)?;
    stieltjes(n, p, &rule, precision)
}

/// Lanczos on the discrete measure Σ W_i δ(x - x_i), W_i = w_i (x_i + t)^λ,
/// using unit vectors v_k = √W π_k / √h_k with full reorthogonalisation.
pub fn stieltjes(
    n: usize,
    p: &WeightParams,
    rule: &QuadratureRule,
    precision: Precision,
) -> Result<RecurrenceTable> {
    let x = &rule.nodes;
    let ln_w: Vec<f64> = x
        .iter()
        .zip(&rule.ln_weights)
        .map(|(&xi, &lw)| lw + p.ln_perturbation(xi) + (p.alpha() - rule.base_alpha) * xi.ln())
        .collect();
    let ln_max = ln_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // Entry i of every Lanczos vector is stored as e^{g_i} times a mantissa,
    // g_i = ln(W_i / W_max)/4, so that both √W_i (k = 0) and O(1) entries at
    // high degree stay in range for nodes far beyond x ~ 1400.
    let keep: Vec<usize> = (0..x.len()).filter(|&i| ln_w[i] - ln_max > LN_REL_FLOOR).collect();
    let x: Vec<f64> = keep.iter().map(|&i| x[i]).collect();
    let scale: Vec<f64> = keep.iter().map(|&i| (0.25 * (ln_w[i] - ln_max)).exp()).collect();
    let root_w: Vec<f64> = scale.clone();
    let mass = sdot(&root_w, &root_w, &scale, precision);
    let ln_h0 = mass.ln() + ln_max;

    let inv = 1.0 / mass.sqrt();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    basis.push(root_w.iter().map(|r| r * inv).collect());

    let mut a = Vec::with_capacity(n + 1);
    let mut b = vec![ln_h0.exp()];
    let mut ln_h = vec![ln_h0];
    let mut beta_prev = 0.0;
    for k in 0..=n {
        let v = &basis[k];
        let xv: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi * vi).collect();
        let ak = sdot(&xv, v, &scale, precision);
        a.push(ak);
        if k == n {
            break;
        }
        let mut u: Vec<f64> = xv.iter().zip(v).map(|(xvi, vi)| xvi - ak * vi).collect();
        if k > 0 {
            for (ui, wi) in u.iter_mut().zip(&basis[k - 1]) {
                *ui -= beta_prev * wi;
            }
        }
        for _ in 0..2 {
            for q in &basis {
                let c = sdot(&u, q, &scale, precision);
                for (ui, qi) in u.iter_mut().zip(q) {
                    *ui -= c * qi;
                }
            }
        }
        let norm2 = sdot(&u, &u, &scale, precision);
        let beta = norm2.sqrt();
        let bk = beta * beta;
        if !(bk > 0.0) || !bk.is_finite() {
            return Err(Error::PrecisionExhausted { index: k + 1, value: bk });
        }
        b.push(bk);
        ln_h.push(ln_h[k] + bk.ln());
        let inv = 1.0 / beta;
        basis.push(u.iter().map(|ui| ui * inv).collect());
        beta_prev = beta;
    }
    Ok(RecurrenceTable {
        a,
        b,
        ln_h,
        params: *p,
    })
}

/// Nodes with W_i / W_max below e^{LN_REL_FLOOR} are dropped; the mantissas
/// of the kept ones stay below e^{-LN_REL_FLOOR/4} times the node size.
const LN_REL_FLOOR: f64 = -2700.0;

/// Σ (s_i x_i)(s_i y_i).
fn sdot(x: &[f64], y: &[f64], s: &[f64], precision: Precision) -> f64 {
    let terms = x.iter().zip(y).zip(s).map(|((&a, &b), &si)| (si * a, si * b));
    match precision {
        Precision::Double => {
            // four accumulators
            let mut acc = [0.0f64; 4];
            for (j, (a, b)) in terms.enumerate() {
                acc[j % 4] += a * b;
            }
            (acc[0] + acc[1]) + (acc[2] + acc[3])
        }
        Precision::Extended => terms
            .map(|(a, b)| DoubleDouble::mul_f64(a, b))
            .sum::<DoubleDouble>()
            .to_f64(),
    }
}

/// ∫ x^{α+k} (x + t)^λ e^{-x} dx by quadrature, checked
/// against a rule of twice the order.
pub fn moment(k: usize, p: &WeightParams) -> Result<f64> {
    if k > 512 {
        return Err(Error::domain("moment", format!("k = {k} exceeds 512")));
    }
    let low = (2 * k + 64).max(128);
    let high = 2 * low;
    let eval = |order: usize| -> Result<f64> {
        let rule = discretize(p, k, order)?;
        Ok(rule
            .nodes
            .iter()
            .zip(&rule.ln_weights)
            .map(|(&x, &lw)| (lw + p.ln_perturbation(x) + k as f64 * x.ln()).exp())
            .sum())
    };
    let m_low = eval(low)?;
    let m_high = eval(high)?;
    let rel_diff = ((m_high - m_low) / m_high).abs();
    if rel_diff > 1e-9 {
        return Err(Error::QuadratureMismatch { low, high, rel_diff });
    }
    Ok(m_high)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_laguerre_coefficients() {
        let p = WeightParams::classical(1.0).unwrap();
        let t = build_recurrence(12, &p).unwrap();
        for k in 0..=10 {
            let kf = k as f64;
            assert!((t.a[k] - (2.0 * kf + 2.0)).abs() < 1e-10 * (kf + 1.0), "a_{k}");
            if k > 0 {
                assert!((t.b[k] - kf * (kf + 1.0)).abs() < 1e-10 * kf * kf, "b_{k}");
            }
        }
        assert!((t.h(0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn binomial_h0() {
        let p = WeightParams::new(1.0, 1.0, 1.0).unwrap();
        let t = build_recurrence(4, &p).unwrap();
        assert!((t.h(0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn moments_binomial() {
        let p = WeightParams::classical(1.0).unwrap();
        assert!((moment(0, &p).unwrap() - 1.0).abs() < 1e-13);
        let p = WeightParams::new(1.0, 1.0, 2.0).unwrap();
        assert!((moment(0, &p).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn extended_matches_double() {
        let p = WeightParams::new(1.5, 0.5, 0.5).unwrap();
        let d = build_recurrence_with(30, &p, 256, Precision::Double).unwrap();
        let e = build_recurrence_with(30, &p, 256, Precision::Extended).unwrap();
        for k in 0..30 {
            assert!((d.a[k] - e.a[k]).abs() < 1e-11 * e.a[k].abs());
            assert!((d.b[k + 1] - e.b[k + 1]).abs() < 1e-11 * e.b[k + 1]);
        }
    }

    #[test]
    fn degree_cap() {
        let p = WeightParams::classical(1.0).unwrap();
        assert!(build_recurrence(MAX_DEGREE_DOUBLE + 1, &p).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let p = WeightParams::classical(1.0).unwrap();
        let csv = build_recurrence(3, &p).unwrap().to_csv();
        let rows: Vec<_> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "k,a,b,h");
        assert_eq!(rows.len(), 5);
        assert!(rows[1].starts_with("0,"));
    }

    #[test]
    fn huge_norms_format() {
        let s = fmt_ln(1000.0 * std::f64::consts::LN_10 + 0.5);
        let (mant, exp) = s.split_once('e').unwrap();
        assert_eq!(exp, "1000");
        let want = 0.5f64.exp();
        assert!((mant.parse::<f64>().unwrap() - want).abs() < 1e-11);
    }
}
