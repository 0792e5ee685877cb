//! Desk-scale experiments behind the command-line tool. Each returns a
//! [`Report`] with a pass flag and a CSV table; nothing here touches the
//! filesystem.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limit_kernels::{airy_kernel, bessel_kernel, fmt17, mp_density};
use crate::opq::{cd_kernel, FiniteKernel, HardEdgeKernel, Precision, SoftEdgeKernel, WeightParams};
use crate::painleve::{
    det, lax_matrices, q_first_integral, q_from_jet, residual_rre06, residual_second_order,
    residual_third_order, solve_r_with, PainleveJet, SolveOptions,
};
use crate::phi_kernel::{kernel_from_phi, phi_large_s};

/// A list of grid values, parsed from `lo:hi:count` or `a,b,c`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec(pub Vec<f64>);

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse grid '{text}'"));
        let values = if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
            match count {
                0 => Vec::new(),
                1 => vec![lo],
                _ => (0..count)
                    .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
                    .collect(),
            }
        } else {
            text.split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        let grid = GridSpec(values);
        grid.validate(text)?;
        Ok(grid)
    }
}

impl GridSpec {
    fn validate(&self, label: &str) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::Config(format!("grid '{label}' is empty")));
        }
        if !self.0.iter().all(|v| v.is_finite()) || self.0.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!("grid '{label}' must be finite and increasing")));
        }
        Ok(())
    }
}

/// Everything an experiment may read. Fields an experiment does not use are
/// ignored; [`ExperimentConfig::default`] holds the desk-scale defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub n: Vec<usize>,
    pub s: Option<f64>,
    pub t: Vec<f64>,
    pub u_grid: Vec<f64>,
    pub v_grid: Vec<f64>,
    pub pairs: Vec<(f64, f64)>,
    pub tol: Option<f64>,
    pub precision: Precision,
    pub seed: u64,
    pub count: usize,
    pub s_max: f64,
    pub s0: f64,
    pub order: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            lambda: 0.5,
            n: vec![64],
            s: None,
            t: vec![1.0],
            u_grid: (1..=8).map(f64::from).collect(),
            v_grid: (1..=8).map(f64::from).collect(),
            pairs: vec![(1.0, 1.0), (1.0, 2.0), (2.0, 4.0)],
            tol: None,
            precision: Precision::Double,
            seed: 0,
            count: 100,
            s_max: 400.0,
            s0: 1e-3,
            order: 4,
        }
    }
}

impl ExperimentConfig {
    fn first_n(&self) -> Result<usize> {
        let n = *self.n.first().ok_or_else(|| Error::Config("no n given".into()))?;
        if n == 0 || n > self.precision.max_degree() {
            return Err(Error::Config(format!(
                "n = {n} outside 1..={} for {:?} precision",
                self.precision.max_degree(),
                self.precision
            )));
        }
        Ok(n)
    }

    fn grids(&self) -> Result<()> {
        GridSpec(self.u_grid.clone()).validate("u-grid")?;
        GridSpec(self.v_grid.clone()).validate("v-grid")
    }

    fn header(&self, out: &mut String, experiment: &str) {
        let _ = writeln!(out, "# experiment={experiment}");
        let _ = writeln!(out, "# alpha={}", fmt17(self.alpha));
        let _ = writeln!(out, "# lambda={}", fmt17(self.lambda));
        let _ = writeln!(out, "# precision={:?}", self.precision);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: String,
    pub passed: bool,
    /// The quantity compared against `threshold`.
    pub metric: f64,
    pub threshold: f64,
    /// Extra human-readable findings.
    pub notes: Vec<String>,
    pub csv: String,
}

impl Report {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} (metric {:.3e}, threshold {:.3e})",
            self.experiment,
            if self.passed { "PASS" } else { "FAIL" },
            self.metric,
            self.threshold
        );
        for n in &self.notes {
            s.push_str("\n  ");
            s.push_str(n);
        }
        s
    }
}

fn comparison_rows(out: &mut String, us: &[f64], vs: &[f64], values: &[Vec<f64>], refs: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, &u) in us.iter().enumerate() {
        for (j, &v) in vs.iter().enumerate() {
            let err = (values[i][j] - refs[i][j]).abs();
            worst = worst.max(err);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(u),
                fmt17(v),
                fmt17(values[i][j]),
                fmt17(refs[i][j]),
                fmt17(err)
            );
        }
    }
    worst
}

fn tabulate<F>(us: &[f64], vs: &[f64], f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    us.par_iter()
        .map(|&u| vs.iter().map(|&v| f(u, v)).collect::<Result<Vec<_>>>())
        .collect()
}

/// Bulk density: 4 K_n(4nx, 4nx) against (2/π)√((1-x)/x).
pub fn density(cfg: &ExperimentConfig, xs: &[f64]) -> Result<Report> {
    if xs.is_empty() || xs.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::Config("density points must lie in (0, 1)".into()));
    }
    let n = cfg.first_n()?;
    let t = *cfg.t.first().unwrap_or(&1.0);
    let params = WeightParams::new(cfg.alpha, cfg.lambda, t).map_err(|e| Error::Config(e.to_string()))?;
    let kernel = FiniteKernel::with_precision(n, &params, cfg.precision)?;
    let threshold = cfg.tol.unwrap_or(0.02);
    let rows: Vec<(f64, f64, f64)> = xs
        .par_iter()
        .map(|&x| {
            let z = 4.0 * n as f64 * x;
            let emp = 4.0 * cd_kernel(z, z, n, &kernel.table)?;
            Ok((x, emp, mp_density(x)?))
        })
        .collect::<Result<_>>()?;
    let mut csv = String::new();
    cfg.header(&mut csv, "density");
    let _ = writeln!(csv, "# n={n} t={}", fmt17(t));
    csv.push_str("x,empirical,mu,rel_err\n");
    let mut worst: f64 = 0.0;
    for (x, emp, mu) in rows {
        let rel = ((emp - mu) / mu).abs();
        worst = worst.max(rel);
        let _ = writeln!(csv, "{},{},{},{}", fmt17(x), fmt17(emp), fmt17(mu), fmt17(rel));
    }
    Ok(Report {
        experiment: "density".into(),
        passed: worst < threshold,
        metric: worst,
        threshold,
        notes: Vec::new(),
        csv,
    })
}

/// Hard edge with s small: (1/4n) K_n(u/4n, v/4n; s/4n) against the Bessel
/// kernel of order α+λ.
pub fn hard_edge_small_s(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.grids()?;
    let n = cfg.first_n()?;
    let s = cfg.s.unwrap_or(0.01);
    let order = cfg.alpha + cfg.lambda;
    let kernel = HardEdgeKernel::with_precision(cfg.alpha, cfg.lambda, n, s, cfg.precision)?;
    let values = tabulate(&cfg.u_grid, &cfg.v_grid, |u, v| kernel.eval(u, v))?;
    let refs = tabulate(&cfg.u_grid, &cfg.v_grid, |u, v| bessel_kernel(order, u, v))?;
    let threshold = cfg.tol.unwrap_or(5e-2);
    let mut csv = String::new();
    cfg.header(&mut csv, "hard-edge small-s");
    let _ = writeln!(csv, "# n={n} s={} reference=bessel(order={})", fmt17(s), fmt17(order));
    csv.push_str("u,v,value,reference,abs_err\n");
    let worst = comparison_rows(&mut csv, &cfg.u_grid, &cfg.v_grid, &values, &refs);
    Ok(Report {
        experiment: "hard-edge small-s".into(),
        passed: worst < threshold,
        metric: worst,
        threshold,
        notes: Vec::new(),
        csv,
    })
}

/// Hard edge with s large, through the explicit large-s φ-pair, against the
/// Bessel kernel of order α.
pub fn hard_edge_large_s(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.grids()?;
    let s = cfg.s.unwrap_or(1e4);
    let (a, l) = (cfg.alpha, cfg.lambda);
    let pairs_u: Vec<_> = cfg.u_grid.iter().map(|&u| phi_large_s(u, s, a, l)).collect::<Result<_>>()?;
    let pairs_v: Vec<_> = cfg.v_grid.iter().map(|&v| phi_large_s(v, s, a, l)).collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(pairs_u.len());
    for pu in &pairs_u {
        values.push(pairs_v.iter().map(|pv| kernel_from_phi(pu, pv)).collect::<Result<Vec<_>>>()?);
    }
    let refs = tabulate(&cfg.u_grid, &cfg.v_grid, |u, v| bessel_kernel(a, u, v))?;
    let threshold = cfg.tol.unwrap_or(5e-2);
    let mut csv = String::new();
    cfg.header(&mut csv, "hard-edge large-s");
    let _ = writeln!(csv, "# s={} route=phi reference=bessel(order={})", fmt17(s), fmt17(a));
    csv.push_str("u,v,value,reference,abs_err\n");
    let worst = comparison_rows(&mut csv, &cfg.u_grid, &cfg.v_grid, &values, &refs);
    Ok(Report {
        experiment: "hard-edge large-s".into(),
        passed: worst < threshold,
        metric: worst,
        threshold,
        notes: Vec::new(),
        csv,
    })
}

/// Whether the finite-n diagonal at moderate s lies between the two Bessel
/// limits, J_{α+λ}(u,u) and J_α(u,u), for every u.
pub fn interpolation_check(cfg: &ExperimentConfig, s: f64, us: &[f64]) -> Result<Report> {
    let n = cfg.first_n()?;
    let (a, l) = (cfg.alpha, cfg.lambda);
    let kernel = HardEdgeKernel::with_precision(a, l, n, s, cfg.precision)?;
    let mut csv = String::new();
    cfg.header(&mut csv, "hard-edge interpolation");
    let _ = writeln!(csv, "# n={n} s={}", fmt17(s));
    csv.push_str("u,value,bessel_small_s,bessel_large_s,between\n");
    let mut all = true;
    let mut worst_margin = f64::INFINITY;
    for &u in us {
        let k = kernel.eval(u, u)?;
        let lo_s = bessel_kernel(a + l, u, u)?;
        let hi_s = bessel_kernel(a, u, u)?;
        let (lo, hi) = if lo_s < hi_s { (lo_s, hi_s) } else { (hi_s, lo_s) };
        let between = k > lo && k < hi;
        all &= between;
        worst_margin = worst_margin.min((k - lo).min(hi - k));
        let _ = writeln!(csv, "{},{},{},{},{}", fmt17(u), fmt17(k), fmt17(lo_s), fmt17(hi_s), between);
    }
    Ok(Report {
        experiment: "hard-edge interpolation".into(),
        passed: all,
        metric: worst_margin,
        threshold: 0.0,
        notes: Vec::new(),
        csv,
    })
}

/// Fixed s: successive differences |K(n) - K(2n)| over the n ladder.
pub fn hard_edge_fixed_s(cfg: &ExperimentConfig) -> Result<Report> {
    let s = cfg.s.unwrap_or(5.0);
    if cfg.n.len() < 3 {
        return Err(Error::Config("fixed-s needs at least three values of n".into()));
    }
    if cfg.n.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::Config("fixed-s n values must double".into()));
    }
    if cfg.pairs.is_empty() {
        return Err(Error::Config("fixed-s needs at least one (u, v) pair".into()));
    }
    let ratio_max = cfg.tol.unwrap_or(0.7);
    let kernels: Vec<HardEdgeKernel> = cfg
        .n
        .par_iter()
        .map(|&n| {
            if n > cfg.precision.max_degree() {
                return Err(Error::Config(format!("n = {n} beyond the precision cap")));
            }
            HardEdgeKernel::with_precision(cfg.alpha, cfg.lambda, n, s, cfg.precision)
        })
        .collect::<Result<_>>()?;
    let mut csv = String::new();
    cfg.header(&mut csv, "hard-edge fixed-s");
    let _ = writeln!(csv, "# s={}", fmt17(s));
    csv.push_str("u,v,n,value,diff_to_2n,ratio\n");
    let mut passed = true;
    let mut worst_ratio: f64 = 0.0;
    for &(u, v) in &cfg.pairs {
        let vals: Vec<f64> = kernels.iter().map(|k| k.eval(u, v)).collect::<Result<_>>()?;
        let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for (k, &n) in cfg.n.iter().enumerate() {
            let d = diffs.get(k).copied();
            let ratio = if k >= 1 { d.map(|d| d / diffs[k - 1]) } else { None };
            if let Some(r) = ratio {
                worst_ratio = worst_ratio.max(r);
                passed &= r < ratio_max;
            }
            let fmt_opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                fmt17(u),
                fmt17(v),
                n,
                fmt17(vals[k]),
                fmt_opt(d),
                fmt_opt(ratio)
            );
        }
    }
    Ok(Report {
        experiment: "hard-edge fixed-s".into(),
        passed,
        metric: worst_ratio,
        threshold: ratio_max,
        notes: Vec::new(),
        csv,
    })
}

/// Soft edge: 2(2n)^{1/3} K_n(4n + 2(2n)^{1/3}u, …; t) against the Airy
/// kernel, for every t in the config.
pub fn soft_edge(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.grids()?;
    if cfg.u_grid.iter().chain(&cfg.v_grid).any(|&x| x >= 0.0) {
        return Err(Error::Config("soft-edge grids must be negative".into()));
    }
    let n = cfg.first_n()?;
    if cfg.t.is_empty() {
        return Err(Error::Config("soft-edge needs at least one t".into()));
    }
    let threshold = cfg.tol.unwrap_or(5e-2);
    let refs = tabulate(&cfg.u_grid, &cfg.v_grid, |u, v| Ok(airy_kernel(u, v)))?;
    let mut csv = String::new();
    cfg.header(&mut csv, "soft-edge");
    let _ = writeln!(csv, "# n={n}");
    csv.push_str("t,u,v,value,reference,abs_err\n");
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    let mut all = true;
    for &t in &cfg.t {
        let params = WeightParams::new(cfg.alpha, cfg.lambda, t).map_err(|e| Error::Config(e.to_string()))?;
        let kernel = SoftEdgeKernel::with_precision(&params, n, cfg.precision)?;
        let values = tabulate(&cfg.u_grid, &cfg.v_grid, |u, v| kernel.eval(u, v))?;
        let mut err_t: f64 = 0.0;
        for (i, &u) in cfg.u_grid.iter().enumerate() {
            for (j, &v) in cfg.v_grid.iter().enumerate() {
                let err = (values[i][j] - refs[i][j]).abs();
                err_t = err_t.max(err);
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    fmt17(t),
                    fmt17(u),
                    fmt17(v),
                    fmt17(values[i][j]),
                    fmt17(refs[i][j]),
                    fmt17(err)
                );
            }
        }
        all &= err_t < threshold;
        worst = worst.max(err_t);
        notes.push(format!("t = {t}: max error {err_t:.3e}"));
    }
    Ok(Report {
        experiment: "soft-edge".into(),
        passed: all,
        metric: worst,
        threshold,
        notes,
        csv,
    })
}

/// Solves for r(s) and checks the residual bounds along the trajectory.
pub fn painleve(cfg: &ExperimentConfig) -> Result<Report> {
    let tol = cfg.tol.unwrap_or(1e-12);
    let opts = SolveOptions {
        s0: cfg.s0,
        order: cfg.order,
        ..SolveOptions::default()
    };
    let sol = solve_r_with(cfg.alpha, cfg.lambda, cfg.s_max, tol, &opts)?;
    let (r31, r04, r06) = (sol.max_res31(), sol.max_res_rre04(), sol.max_res_rre06());
    let passed = r31 < 1e-8 && r04 < 1e-6 && r06 < 1e-6;
    Ok(Report {
        experiment: "painleve".into(),
        passed,
        metric: r31,
        threshold: 1e-8,
        notes: vec![
            format!("max third-order residual {r31:.3e}"),
            format!("max second-order integral residual {r04:.3e}"),
            format!("max companion residual {r06:.3e}"),
            format!("shooting segments {}", sol.segments),
        ],
        csv: sol.to_csv(),
    })
}

/// A jet with r′ kept away from the singular manifold.
pub fn random_jet(rng: &mut StdRng) -> PainleveJet {
    let s = rng.gen_range(0.05..20.0);
    let r = rng.gen_range(-4.0..1.0);
    let r1 = if rng.gen_bool(0.5) {
        rng.gen_range(-0.45..-0.02)
    } else {
        rng.gen_range(0.02..0.8)
    };
    let r2 = rng.gen_range(-0.5..0.5);
    let r3 = rng.gen_range(-0.5..0.5);
    PainleveJet::new(s, r, r1, r2, r3)
}

/// Algebraic identities on seeded random jets.
pub fn identities(cfg: &ExperimentConfig) -> Result<Report> {
    if cfg.count == 0 {
        return Err(Error::Config("identities needs a positive count".into()));
    }
    let (a, l) = (cfg.alpha, cfg.lambda);
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut csv = String::new();
    cfg.header(&mut csv, "identities");
    let _ = writeln!(csv, "# seed={} count={}", cfg.seed, cfg.count);
    csv.push_str("index,s,remark2_rel,det_a1_err,det_b2_err,first_integral_rel\n");
    let (mut w_rem, mut w_det, mut w_fi): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..cfg.count {
        let jet = random_jet(&mut rng);
        let r1 = jet.r1;
        let r31 = residual_third_order(&jet, a, l);
        let r4 = residual_second_order(&jet, a, l, 0.0);
        let r6 = residual_rre06(&jet, a, l, 0.0);
        let combo = -8.0 * r1 * r4 + (2.0 * r1 + 1.0) * r6;
        let mag = r31.abs().max((8.0 * r1 * r4).abs()).max(((2.0 * r1 + 1.0) * r6).abs());
        let rem = (r31 - combo).abs() / mag.max(f64::MIN_POSITIVE);
        let lax = lax_matrices(&jet, a, l)?;
        let da1 = (det(&lax.a1).re + a * a / 4.0).abs() + det(&lax.a1).im.abs();
        let db2 = (det(&lax.b2).re + l * l / 4.0).abs() + det(&lax.b2).im.abs();
        // (q from r, r′, r″) - (q from the first integral), times r′(2r′+1),
        // is minus the second-order residual
        let g = r1 * (2.0 * r1 + 1.0);
        let lhs = (q_from_jet(&jet, a, l)? - q_first_integral(&jet, 0.0)) * g;
        let fi = (lhs + r4).abs() / r4.abs().max(lhs.abs()).max(1.0);
        w_rem = w_rem.max(rem);
        w_det = w_det.max(da1).max(db2);
        w_fi = w_fi.max(fi);
        let _ = writeln!(csv, "{k},{},{},{},{},{}", fmt17(jet.s), fmt17(rem), fmt17(da1), fmt17(db2), fmt17(fi));
    }
    let passed = w_rem < 1e-12 && w_det < 1e-8 && w_fi < 1e-12;
    Ok(Report {
        experiment: "identities".into(),
        passed,
        metric: w_rem,
        threshold: 1e-12,
        notes: vec![
            format!("combination identity: worst relative error {w_rem:.3e}"),
            format!("determinants: worst error {w_det:.3e}"),
            format!("first integral: worst relative error {w_fi:.3e}"),
        ],
        csv,
    })
}
