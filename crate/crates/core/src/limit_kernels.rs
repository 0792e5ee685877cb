//! Limiting kernels: Bessel, Airy, and the bulk density, plus the
//! [`KernelGrid`] table type shared by every kernel producer.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::{airy_pair, j_pair};

/// Relative width of the band around u = v where the kernels switch to their
/// diagonal expansions.
pub const DIAG_THRESHOLD: f64 = 1e-4;

/// Scaling applied to a finite-n kernel before it was tabulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaling {
    None,
    Hard { n: usize, s: f64 },
    Soft { n: usize, t: f64 },
}

impl std::fmt::Display for Scaling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scaling::None => write!(f, "none"),
            Scaling::Hard { n, s } => write!(f, "hard(n={n},s={s})"),
            Scaling::Soft { n, t } => write!(f, "soft(n={n},t={t})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMeta {
    pub kernel: String,
    pub order: Option<f64>,
    pub scaling: Scaling,
    /// Extra `key=value` pairs written to the header.
    pub extra: Vec<(String, String)>,
}

impl GridMeta {
    pub fn new(kernel: impl Into<String>, order: Option<f64>, scaling: Scaling) -> Self {
        Self {
            kernel: kernel.into(),
            order,
            scaling,
            extra: Vec::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.extra.push((key.into(), value.to_string()));
        self
    }
}

/// Rectangular table of kernel values, `values[i][j] = K(u_i, v_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGrid {
    pub u_values: Vec<f64>,
    pub v_values: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub meta: GridMeta,
}

impl KernelGrid {
    /// Evaluates `f` on every (u, v) pair. Rows are filled in parallel; the
    /// result does not depend on scheduling.
    pub fn tabulate<F>(u_values: &[f64], v_values: &[f64], meta: GridMeta, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64> + Sync,
    {
        let values = u_values
            .par_iter()
            .map(|&u| v_values.iter().map(|&v| f(u, v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let grid = Self {
            u_values: u_values.to_vec(),
            v_values: v_values.to_vec(),
            values,
            meta,
        };
        if let Some((i, j)) = grid.first_non_finite() {
            return Err(Error::Pole {
                what: "kernel value (non-finite)",
                value: grid.u_values[i] - grid.v_values[j],
            });
        }
        Ok(grid)
    }

    fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.values.iter().enumerate().find_map(|(i, row)| {
            row.iter().position(|v| !v.is_finite()).map(|j| (i, j))
        })
    }

    /// Largest |self - other| over matching cells.
    pub fn max_abs_diff(&self, other: &KernelGrid) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with `#` metadata lines, header `u,v,value`, rows in (i, j) order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# kernel={}", self.meta.kernel);
        if let Some(order) = self.meta.order {
            let _ = writeln!(out, "# order={}", fmt17(order));
        }
        let _ = writeln!(out, "# scaling={}", self.meta.scaling);
        for (k, v) in &self.meta.extra {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str("u,v,value\n");
        for (i, row) in self.values.iter().enumerate() {
            for (j, value) in row.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    fmt17(self.u_values[i]),
                    fmt17(self.v_values[j]),
                    fmt17(*value)
                );
            }
        }
        out
    }
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn diag_band(u: f64, v: f64) -> bool {
    (u - v).abs() < DIAG_THRESHOLD * u.abs().max(1.0)
}

/// Bessel kernel in the square-root convention,
/// (J_β(√u) √v J'_β(√v) - √u J'_β(√u) J_β(√v)) / (2(u - v)).
pub fn bessel_kernel(beta: f64, u: f64, v: f64) -> Result<f64> {
    if !(u > 0.0) || !(v > 0.0) {
        return Err(Error::domain("bessel_kernel", format!("u = {u}, v = {v} must be positive")));
    }
    if !(beta > -1.0) {
        return Err(Error::domain("bessel_kernel", format!("order {beta} must exceed -1")));
    }
    if diag_band(u, v) {
        return bessel_kernel_near_diag(beta, u, v);
    }
    bessel_kernel_direct(beta, u, v)
}

pub(crate) fn bessel_kernel_direct(beta: f64, u: f64, v: f64) -> Result<f64> {
    let (fu, gu) = bessel_phi(beta, u)?;
    let (fv, gv) = bessel_phi(beta, v)?;
    Ok((fu * gv - gu * fv) / (2.0 * (u - v)))
}

/// (J_β(√x), √x J'_β(√x)).
fn bessel_phi(beta: f64, x: f64) -> Result<(f64, f64)> {
    let r = x.sqrt();
    let (j, j1) = j_pair(beta, r)?;
    Ok((j, beta * j - r * j1))
}

/// Second-order Taylor expansion of the numerator about the midpoint.
///
/// With f(x) = J_β(√x) and g(x) = √x J'_β(√x), Bessel's equation gives
/// f' = g/(2x), g' = (β²/x - 1) f / 2, and the kernel is
/// (f(u)g(v) - g(u)f(v)) / (2(u - v)).
pub(crate) fn bessel_kernel_near_diag(beta: f64, u: f64, v: f64) -> Result<f64> {
    let m = 0.5 * (u + v);
    let h = 0.5 * (v - u);
    let (f, g) = bessel_phi(beta, m)?;
    let b2 = beta * beta;
    let fp = g / (2.0 * m);
    let gp = 0.5 * (b2 / m - 1.0) * f;
    // second derivatives
    let fpp = (gp * m - g) / (2.0 * m * m);
    let gpp = 0.5 * ((b2 / m - 1.0) * fp - b2 / (m * m) * f);
    let fppp = {
        // d/dm (g' m - g) = g'' m
        (gpp * m * m - 2.0 * m * (gp * m - g)) / (2.0 * m.powi(4))
    };
    let gppp = 0.5 * ((b2 / m - 1.0) * fpp - 2.0 * b2 / (m * m) * fp + 2.0 * b2 / m.powi(3) * f);
    // numerator is odd in h = (v - u)/2; kernel = numerator / (-4h)
    let first = f * gp - g * fp;
    let third = (f * gppp - g * fppp) + 3.0 * (fpp * gp - gpp * fp);
    let n_over_h = 2.0 * first + h * h / 3.0 * third;
    Ok(-n_over_h / 4.0)
}

/// Airy kernel (Ai(u)Ai'(v) - Ai'(u)Ai(v)) / (u - v).
pub fn airy_kernel(u: f64, v: f64) -> f64 {
    if diag_band(u, v) {
        return airy_kernel_near_diag(u, v);
    }
    let (au, apu) = airy_pair(u);
    let (av, apv) = airy_pair(v);
    (au * apv - apu * av) / (u - v)
}

fn airy_kernel_near_diag(u: f64, v: f64) -> f64 {
    let m = 0.5 * (u + v);
    let h = 0.5 * (v - u);
    let (a, ap) = airy_pair(m);
    // Ai'' = m Ai, Ai''' = Ai + m Ai'
    let app = m * a;
    let appp = a + m * ap;
    // A'''' = 2A' + m A''
    let apppp = 2.0 * ap + m * app;
    let first = a * app - ap * ap;
    let third = (a * apppp - ap * appp) + 3.0 * (app * app - appp * ap);
    let n_over_h = 2.0 * first + h * h / 3.0 * third;
    -n_over_h / 2.0
}

/// Diagonal of the Airy kernel, Ai'(x)² - x Ai(x)².
pub fn airy_kernel_diagonal(x: f64) -> f64 {
    let (a, ap) = airy_pair(x);
    ap * ap - x * a * a
}

/// Bulk density (2/π)√((1-x)/x) on (0, 1).
pub fn mp_density(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain("mp_density", format!("x = {x} outside (0, 1)")));
    }
    Ok(2.0 / PI * ((1.0 - x) / x).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_diagonal_at_origin() {
        let ap0 = -0.258_819_403_792_806_8f64;
        assert!((airy_kernel(0.0, 0.0) - ap0 * ap0).abs() < 1e-15);
        assert!((airy_kernel_diagonal(0.0) - ap0 * ap0).abs() < 1e-15);
    }

    #[test]
    fn airy_symmetric() {
        assert_eq!(airy_kernel(-1.0, -2.0), airy_kernel(-2.0, -1.0));
    }

    #[test]
    fn bessel_symmetric() {
        for &beta in &[0.0, 0.7, 2.0] {
            let a = bessel_kernel(beta, 2.0, 5.0).unwrap();
            let b = bessel_kernel(beta, 5.0, 2.0).unwrap();
            assert!((a - b).abs() <= 1e-15 * a.abs());
        }
    }

    #[test]
    fn bessel_diagonal_closed_form() {
        // J(u,u) = (J_β(√u)² - J_{β+1}(√u) J_{β-1}(√u)) / 4
        for &(beta, u) in &[(0.0f64, 1.0f64), (1.5, 3.0), (2.0, 7.0)] {
            let r: f64 = u.sqrt();
            let jb = j_pair(beta, r).unwrap().0;
            let jp = j_pair(beta + 1.0, r).unwrap().0;
            let jm = 2.0 * beta / r * jb - jp;
            let want = 0.25 * (jb * jb - jp * jm);
            assert!((bessel_kernel(beta, u, u).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn density_values() {
        assert!((mp_density(0.5).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!(mp_density(1.0 - 1e-12).unwrap() < 1e-5);
        assert!(mp_density(0.0).is_err());
        assert!(mp_density(1.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let meta = GridMeta::new("airy", None, Scaling::None);
        let g = KernelGrid::tabulate(&[-1.0, -2.0], &[-1.0], meta, |u, v| Ok(airy_kernel(u, v)))
            .unwrap();
        let csv = g.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "# kernel=airy");
        assert_eq!(lines[2], "u,v,value");
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("-1.0000000000000000e0,-1.0000000000000000e0,"));
    }
}
