use super::recurrence::{
    build_recurrence, build_recurrence_with, default_quadrature_order, Precision, RecurrenceTable,
};
use super::weight::WeightParams;
use crate::error::{Error, Result};

/// Relative distance below which the confluent formula is used.
pub const CONFLUENT_THRESHOLD: f64 = 1e-8;

const RESCALE: f64 = 1e150;

/// √w(x) p_{n-1}(x), √w(x) p_n(x) and the same with polynomial derivatives,
/// with p_k the orthonormal polynomials. All four share the factor e^{ln_scale}.
#[derive(Debug, Clone, Copy)]
struct ScaledPair {
    prev: f64,
    cur: f64,
    dprev: f64,
    dcur: f64,
    ln_scale: f64,
}

fn orthonormal_pair(x: f64, n: usize, table: &RecurrenceTable, derivs: bool) -> ScaledPair {
    // ψ_0 = √(w/h_0)
    let mut ln_scale = 0.5 * (table.params.ln_weight_unchecked(x) - table.ln_h[0]);
    let (mut prev, mut cur) = (0.0, 1.0);
    let (mut dprev, mut dcur) = (0.0, 0.0);
    for k in 0..n {
        let sb_k = if k == 0 { 0.0 } else { table.b[k].sqrt() };
        let sb_k1 = table.b[k + 1].sqrt();
        let shift = x - table.a[k];
        let next = (shift * cur - sb_k * prev) / sb_k1;
        if derivs {
            let dnext = (shift * dcur + cur - sb_k * dprev) / sb_k1;
            dprev = dcur;
            dcur = dnext;
        }
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs()).max(dcur.abs());
        if mag > RESCALE || (mag < 1.0 / RESCALE && mag > 0.0) {
            let f = 1.0 / mag;
            prev *= f;
            cur *= f;
            dprev *= f;
            dcur *= f;
            ln_scale += mag.ln();
        }
    }
    ScaledPair {
        prev,
        cur,
        dprev,
        dcur,
        ln_scale,
    }
}

fn check_depth(n: usize, table: &RecurrenceTable) -> Result<()> {
    if n == 0 || table.depth() < n + 1 || table.b.len() < n + 1 {
        return Err(Error::domain(
            "cd_kernel",
            format!("table depth {} too small for n = {n}", table.depth()),
        ));
    }
    Ok(())
}

/// Christoffel-Darboux kernel √(w(x)w(y)) Σ_{k<n} π_k(x)π_k(y)/h_k, in closed form.
pub fn cd_kernel(x: f64, y: f64, n: usize, table: &RecurrenceTable) -> Result<f64> {
    if !(x > 0.0) || !(y > 0.0) {
        return Err(Error::domain("cd_kernel", format!("x = {x}, y = {y} must be positive")));
    }
    check_depth(n, table)?;
    let sb_n = table.b[n].sqrt();
    if (x - y).abs() < CONFLUENT_THRESHOLD * x.max(1.0) {
        let m = 0.5 * (x + y);
        let p = orthonormal_pair(m, n, table, true);
        let core = p.dcur * p.prev - p.dprev * p.cur;
        return Ok(sb_n * core * (2.0 * p.ln_scale).exp());
    }
    let px = orthonormal_pair(x, n, table, false);
    let py = orthonormal_pair(y, n, table, false);
    let core = px.cur * py.prev - py.cur * px.prev;
    Ok(sb_n * core / (x - y) * (px.ln_scale + py.ln_scale).exp())
}

/// The same kernel by direct summation of √w p_k, for cross-checks at small n.
pub fn cd_kernel_sum(x: f64, y: f64, n: usize, table: &RecurrenceTable) -> Result<f64> {
    check_depth(n, table)?;
    let values = |z: f64| -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let lw = table.params.ln_weight_unchecked(z);
        let mut prev = 0.0;
        let mut cur = (0.5 * (lw - table.ln_h[0])).exp();
        for k in 0..n {
            out.push(cur);
            let sb_k = if k == 0 { 0.0 } else { table.b[k].sqrt() };
            let next = ((z - table.a[k]) * cur - sb_k * prev) / table.b[k + 1].sqrt();
            prev = cur;
            cur = next;
        }
        out
    };
    let vx = values(x);
    let vy = values(y);
    Ok(vx.iter().zip(&vy).map(|(a, b)| a * b).sum())
}

/// A finite-n kernel with its recurrence table built once.
#[derive(Debug, Clone)]
pub struct FiniteKernel {
    pub n: usize,
    pub table: RecurrenceTable,
}

impl FiniteKernel {
    pub fn new(n: usize, params: &WeightParams) -> Result<Self> {
        Ok(Self {
            n,
            table: build_recurrence(n, params)?,
        })
    }

    pub fn with_precision(n: usize, params: &WeightParams, precision: Precision) -> Result<Self> {
        let order = default_quadrature_order(n, params.t());
        Ok(Self {
            n,
            table: build_recurrence_with(n, params, order, precision)?,
        })
    }

    pub fn from_table(n: usize, table: RecurrenceTable) -> Result<Self> {
        check_depth(n, &table)?;
        Ok(Self { n, table })
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        cd_kernel(x, y, self.n, &self.table)
    }
}

/// (1/4n) K_n(u/4n, v/4n; t = s/4n), prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct HardEdgeKernel {
    pub s: f64,
    kernel: FiniteKernel,
}

impl HardEdgeKernel {
    pub fn new(alpha: f64, lambda: f64, n: usize, s: f64) -> Result<Self> {
        Self::with_precision(alpha, lambda, n, s, Precision::Double)
    }

    pub fn with_precision(alpha: f64, lambda: f64, n: usize, s: f64, precision: Precision) -> Result<Self> {
        if n == 0 || !(s > 0.0) {
            return Err(Error::domain("scaled_hard", format!("n = {n}, s = {s}")));
        }
        let t = s / (4.0 * n as f64);
        let params = WeightParams::new(alpha, lambda, t)?;
        Ok(Self {
            s,
            kernel: FiniteKernel::with_precision(n, &params, precision)?,
        })
    }

    pub fn n(&self) -> usize {
        self.kernel.n
    }

    pub fn params(&self) -> &WeightParams {
        &self.kernel.table.params
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        if !(u > 0.0) || !(v > 0.0) {
            return Err(Error::domain("scaled_hard", format!("u = {u}, v = {v} must be positive")));
        }
        let c = 4.0 * self.kernel.n as f64;
        Ok(self.kernel.eval(u / c, v / c)? / c)
    }
}

/// 2(2n)^{1/3} K_n(4n + 2(2n)^{1/3} u, 4n + 2(2n)^{1/3} v; t).
#[derive(Debug, Clone)]
pub struct SoftEdgeKernel {
    kernel: FiniteKernel,
}

impl SoftEdgeKernel {
    pub fn new(params: &WeightParams, n: usize) -> Result<Self> {
        Self::with_precision(params, n, Precision::Double)
    }

    pub fn with_precision(params: &WeightParams, n: usize, precision: Precision) -> Result<Self> {
        Ok(Self {
            kernel: FiniteKernel::with_precision(n, params, precision)?,
        })
    }

    pub fn kernel(&self) -> &FiniteKernel {
        &self.kernel
    }

    pub fn n(&self) -> usize {
        self.kernel.n
    }

    fn scale(&self) -> f64 {
        2.0 * (2.0 * self.kernel.n as f64).cbrt()
    }

    /// Unscaled coordinate for u.
    pub fn position(&self, u: f64) -> f64 {
        4.0 * self.kernel.n as f64 + self.scale() * u
    }

    /// Like [`SoftEdgeKernel::eval`], but recentred at 4n + shift.
    pub fn eval_shifted(&self, u: f64, v: f64, shift: f64) -> Result<f64> {
        let c = self.scale();
        let x = self.position(u) + shift;
        let y = self.position(v) + shift;
        if x <= 0.0 || y <= 0.0 {
            return Err(Error::domain("scaled_soft", "rescaled coordinate left (0, inf)"));
        }
        Ok(c * self.kernel.eval(x, y)?)
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        self.eval_shifted(u, v, 0.0)
    }
}

/// One-shot hard-edge evaluation; builds the recurrence on every call.
pub fn scaled_hard(alpha: f64, lambda: f64, u: f64, v: f64, n: usize, s: f64) -> Result<f64> {
    HardEdgeKernel::new(alpha, lambda, n, s)?.eval(u, v)
}

/// One-shot soft-edge evaluation. Points outside (-∞, 0) are accepted with a
/// warning on stderr; the limit statement only covers negative u, v.
pub fn scaled_soft(params: &WeightParams, u: f64, v: f64, n: usize) -> Result<f64> {
    if u >= 0.0 || v >= 0.0 {
        eprintln!("warning: scaled_soft evaluated at u = {u}, v = {v} outside (-inf, 0)");
    }
    SoftEdgeKernel::new(params, n)?.eval(u, v)
}
