//! Generalised Gauss-Laguerre rules for x^α e^{-x} on (0, ∞).
//!
//! Nodes are eigenvalues of the Laguerre Jacobi matrix (implicit QL, no
//! eigenvectors), polished by Newton on the orthonormal recurrence. Weights
//! come from the Christoffel function, 1/Σ p_k(x_i)², kept in log form so
//! that rules of order several thousand do not underflow.

use super::weight::WeightParams;
use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

pub const MAX_ORDER: usize = 4096;

/// Weights below e^{LN_WEIGHT_FLOOR} are dropped from the rule.
const LN_WEIGHT_FLOOR: f64 = -2800.0;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub ln_weights: Vec<f64>,
    pub base_alpha: f64,
    /// Number of Gauss points before negligible weights were dropped.
    pub order: usize,
}

impl QuadratureRule {
    /// Σ w_i f(x_i).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss rule with `order` points for the weight x^{base_alpha} e^{-x}.
pub fn build_quadrature(order: usize, base_alpha: f64) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::domain("build_quadrature", format!("order {order} outside 1..={MAX_ORDER}")));
    }
    if !(base_alpha > -1.0) {
        return Err(Error::domain("build_quadrature", format!("base_alpha {base_alpha} must exceed -1")));
    }
    let a = base_alpha;
    let mut diag: Vec<f64> = (0..order).map(|k| 2.0 * k as f64 + a + 1.0).collect();
    let mut off: Vec<f64> = (0..order)
        .map(|k| {
            let k = k as f64;
            (k * (k + a)).sqrt()
        })
        .collect();
    // off[k] couples rows k-1 and k; tql expects e[i] coupling i and i+1
    off.rotate_left(1);
    off[order - 1] = 0.0;
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));

    let ln_mass = ln_gamma(a + 1.0)?;
    let mut nodes = Vec::with_capacity(order);
    let mut ln_weights = Vec::with_capacity(order);
    for &x0 in &diag {
        let x = newton_polish(x0, order, a);
        let ln_w = ln_mass - ln_christoffel_sum(x, order, a);
        if ln_w > LN_WEIGHT_FLOOR && x > 0.0 {
            nodes.push(x);
            ln_weights.push(ln_w);
        }
    }
    let weights = ln_weights.iter().map(|l| l.exp()).collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        ln_weights,
        base_alpha,
        order,
    })
}

/// Orthonormal Laguerre recurrence (relative to the normalised weight):
/// √b_{k+1} p_{k+1} = (x - a_k) p_k - √b_k p_{k-1}, a_k = 2k+α+1, b_k = k(k+α).
fn ln_christoffel_sum(x: f64, order: usize, a: f64) -> f64 {
    let mut p_prev = 0.0;
    let mut p = 1.0;
    let mut sum = 1.0;
    let mut ln_scale = 0.0;
    for k in 0..order - 1 {
        let kf = k as f64;
        let bk = (kf * (kf + a)).sqrt();
        let bk1 = ((kf + 1.0) * (kf + 1.0 + a)).sqrt();
        let next = ((x - (2.0 * kf + a + 1.0)) * p - bk * p_prev) / bk1;
        p_prev = p;
        p = next;
        sum += p * p;
        if p.abs() > 1e100 {
            p *= 1e-100;
            p_prev *= 1e-100;
            sum *= 1e-200;
            ln_scale += 200.0 * std::f64::consts::LN_10;
        }
    }
    sum.ln() + ln_scale
}

/// Newton step x -= p_N(x)/p_N'(x) with the same scaled recurrence.
fn newton_polish(mut x: f64, order: usize, a: f64) -> f64 {
    for _ in 0..3 {
        let mut p_prev = 0.0;
        let mut p = 1.0;
        let mut d_prev = 0.0;
        let mut d = 0.0;
        for k in 0..order {
            let kf = k as f64;
            let bk = (kf * (kf + a)).sqrt();
            let bk1 = ((kf + 1.0) * (kf + 1.0 + a)).sqrt();
            let shift = x - (2.0 * kf + a + 1.0);
            let next = (shift * p - bk * p_prev) / bk1;
            let dnext = (shift * d + p - bk * d_prev) / bk1;
            p_prev = p;
            p = next;
            d_prev = d;
            d = dnext;
            if p.abs() > 1e100 || d.abs() > 1e100 {
                p *= 1e-100;
                p_prev *= 1e-100;
                d *= 1e-100;
                d_prev *= 1e-100;
            }
        }
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = p / d;
        if !step.is_finite() || step.abs() > 1e-6 * x.abs().max(1e-300) {
            // QL value already close; a large step means the recurrence is unreliable here
            break;
        }
        x -= step;
        if step.abs() <= 1e-17 * x.abs() {
            break;
        }
    }
    x
}

/// Gauss rule on [0, 1] for the weight y^α, as (nodes, weights).
pub fn gauss_jacobi_unit(order: usize, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::domain("gauss_jacobi_unit", format!("order {order} outside 1..={MAX_ORDER}")));
    }
    if !(alpha > -1.0) {
        return Err(Error::domain("gauss_jacobi_unit", format!("alpha {alpha} must exceed -1")));
    }
    // Jacobi (a, b) = (0, α) on [-1, 1], mapped by y = (1 + x)/2
    let b = alpha;
    let diag: Vec<f64> = (0..order)
        .map(|k| {
            let k = k as f64;
            let x = if k == 0.0 {
                b / (b + 2.0)
            } else {
                b * b / ((2.0 * k + b) * (2.0 * k + b + 2.0))
            };
            0.5 * (1.0 + x)
        })
        .collect();
    let off_sq: Vec<f64> = (1..order)
        .map(|k| {
            let k = k as f64;
            let c = 2.0 * k + b;
            let beta = 4.0 * k * k * (k + b) * (k + b) / (c * c * (c + 1.0) * (c - 1.0));
            0.25 * beta
        })
        .collect();
    gauss_from_recurrence(&diag, &off_sq, 1.0 / (alpha + 1.0))
}

/// Gauss nodes and weights from a Jacobi matrix: `diag` = a_0..a_{N-1},
/// `off_sq` = b_1..b_{N-1}, `mass` = ∫ of the weight.
fn gauss_from_recurrence(diag: &[f64], off_sq: &[f64], mass: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let order = diag.len();
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = off_sq.iter().map(|b| b.sqrt()).collect();
    e.push(0.0);
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    // orthonormal values p_0..p_{N} and p_N' at x
    let eval = |x: f64| -> (f64, f64, f64) {
        let (mut p_prev, mut p) = (0.0, 1.0);
        let (mut d_prev, mut dp) = (0.0, 0.0);
        let mut sum = 1.0;
        for k in 0..order {
            let sb = if k == 0 { 0.0 } else { off_sq[k - 1].sqrt() };
            let sb1 = if k + 1 < order { off_sq[k].sqrt() } else { 1.0 };
            let next = ((x - diag[k]) * p - sb * p_prev) / sb1;
            let dnext = ((x - diag[k]) * dp + p - sb * d_prev) / sb1;
            p_prev = p;
            p = next;
            d_prev = dp;
            dp = dnext;
            if k + 1 < order {
                sum += p * p;
            }
        }
        (p, dp, sum)
    };
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for &x0 in &d {
        let mut x = x0;
        for _ in 0..3 {
            let (p, dp, _) = eval(x);
            let step = p / dp;
            if !step.is_finite() || step.abs() > 1e-6 * x.abs().max(1e-300) {
                break;
            }
            x -= step;
        }
        nodes.push(x);
        weights.push(mass / eval(x).2);
    }
    Ok((nodes, weights))
}

/// Node count per finite panel of [`composite_rule`] for polynomials of degree
/// up to 2`degree` + 1.
pub fn panel_order(degree: usize) -> usize {
    degree + 24
}

/// Whether the plain Laguerre rule of `order` points resolves (x + t)^λ.
/// It does when the perturbation is a polynomial or its branch point -t lies
/// far from the origin on the scale of the smallest nodes.
pub fn laguerre_resolves(p: &WeightParams, order: usize) -> bool {
    let l = p.lambda();
    l == 0.0 || (l > 0.0 && l.fract() == 0.0) || order as f64 * p.t() >= 400.0
}

/// Composite rule for x^α e^{-x} that resolves (x + t)^λ when t is small:
/// Gauss-Jacobi on [0, t], Gauss-Legendre on doubling panels up to 1, and a
/// shifted Gauss-Laguerre tail of `tail_order` points on [1, ∞).
pub fn composite_rule(alpha: f64, t: f64, tail_order: usize, panel: usize) -> Result<QuadratureRule> {
    if !(t > 0.0) {
        return Err(Error::domain("composite_rule", format!("t = {t} must be positive")));
    }
    let c = 1.0;
    let first = t.min(c);
    let mut nodes = Vec::new();
    let mut ln_weights = Vec::new();
    let (yj, wj) = gauss_jacobi_unit(panel, alpha)?;
    for (&y, &w) in yj.iter().zip(&wj) {
        nodes.push(first * y);
        ln_weights.push(w.ln() + (alpha + 1.0) * first.ln() - first * y);
    }
    let (yl, wl) = gauss_jacobi_unit(panel, 0.0)?;
    let mut lo = first;
    while lo < c {
        let hi = (2.0 * lo).min(c);
        let len = hi - lo;
        for (&y, &w) in yl.iter().zip(&wl) {
            let x = lo + len * y;
            nodes.push(x);
            ln_weights.push((w * len).ln() + alpha * x.ln() - x);
        }
        lo = hi;
    }
    let tail = build_quadrature(tail_order, 0.0)?;
    for (&y, &lw) in tail.nodes.iter().zip(&tail.ln_weights) {
        let x = c + y;
        nodes.push(x);
        ln_weights.push(lw + alpha * x.ln() - c);
    }
    let weights = ln_weights.iter().map(|l| l.exp()).collect();
    let order = nodes.len();
    Ok(QuadratureRule {
        nodes,
        weights,
        ln_weights,
        base_alpha: alpha,
        order,
    })
}

/// Rule used to discretise w for degree-`degree` work: the plain Laguerre
/// rule when it suffices, otherwise [`composite_rule`].
pub fn discretize(p: &WeightParams, degree: usize, order: usize) -> Result<QuadratureRule> {
    if laguerre_resolves(p, order) {
        build_quadrature(order, p.alpha())
    } else {
        composite_rule(p.alpha(), p.t(), order, panel_order(degree))
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
/// `d` holds the diagonal and is overwritten with the eigenvalues; `e[i]`
/// couples rows i and i+1 and is destroyed.
pub(crate) fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigenNoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma_fn;

    #[test]
    fn one_point_rule() {
        let q = build_quadrature(1, 0.0).unwrap();
        assert!((q.nodes[0] - 1.0).abs() < 1e-15);
        assert!((q.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_rule() {
        let q = build_quadrature(2, 0.0).unwrap();
        let s2 = 2f64.sqrt();
        assert!((q.nodes[0] - (2.0 - s2)).abs() < 1e-15);
        assert!((q.nodes[1] - (2.0 + s2)).abs() < 1e-14);
    }

    #[test]
    fn total_mass() {
        for &(order, a) in &[(5, 0.0), (64, 1.5), (512, 0.5), (2048, 2.0)] {
            let q = build_quadrature(order, a).unwrap();
            let mass: f64 = q.weights.iter().sum();
            let want = gamma_fn(a + 1.0).unwrap();
            assert!(((mass - want) / want).abs() < 1e-12, "order {order}: {mass}");
        }
    }

    #[test]
    fn monomial_exactness() {
        let order = 20;
        let a = 0.7;
        let q = build_quadrature(order, a).unwrap();
        for k in 0..2 * order {
            let got = q.integrate(|x| x.powi(k as i32));
            let want = crate::specfun::ln_gamma(a + 1.0 + k as f64).unwrap().exp();
            assert!(((got - want) / want).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn jacobi_unit_moments() {
        for &(order, a) in &[(1, 0.0), (8, 0.0), (30, 1.5), (40, -0.5)] {
            let (x, w) = gauss_jacobi_unit(order, a).unwrap();
            for k in 0..2 * order {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                let want = 1.0 / (a + 1.0 + k as f64);
                assert!(((got - want) / want).abs() < 1e-12, "order {order}, a {a}, k {k}");
            }
        }
    }

    #[test]
    fn composite_rule_moments() {
        // x^k against x^α e^{-x}: Γ(α + k + 1)
        let a = 0.7;
        let q = composite_rule(a, 1e-3, 200, panel_order(20)).unwrap();
        for k in 0..40 {
            let got = q.integrate(|x| x.powi(k));
            let want = ln_gamma(a + 1.0 + k as f64).unwrap().exp();
            assert!(((got - want) / want).abs() < 1e-12, "k = {k}");
        }
        // (x + t)^{-1/2} resolved near the origin
        let t = 1e-3;
        let got = q.integrate(|x| (x + t).powf(-0.5));
        let plain = build_quadrature(200, a).unwrap().integrate(|x| (x + t).powf(-0.5));
        let fine = composite_rule(a, t, 400, 80).unwrap().integrate(|x| (x + t).powf(-0.5));
        assert!(((got - fine) / fine).abs() < 1e-13);
        assert!(((plain - fine) / fine).abs() > 1e-8);
    }

    #[test]
    fn nodes_increasing() {
        let q = build_quadrature(300, 1.0).unwrap();
        assert!(q.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn order_limits() {
        assert!(build_quadrature(0, 0.0).is_err());
        assert!(build_quadrature(MAX_ORDER + 1, 0.0).is_err());
        assert!(build_quadrature(4, -1.0).is_err());
    }
}
