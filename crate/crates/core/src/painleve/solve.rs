//! Trajectory of r(s) from the series start out to s_max.
//!
//! The solution leaving s = 0 with the prescribed r(0), r′(0) is one member of
//! a one-parameter family (the free s^{m+1} mode), and it is the only member
//! that stays away from the singular manifold r′(2r′+1) = 0 as s grows:
//! neighbours peel off exponentially, towards r′ = 0 on one side and away from
//! it on the other. The solver shoots on that parameter by bisection. Once the
//! bracket has shrunk to adjacent floats it restarts from a point before the
//! two bracketing trajectories separate, now perturbing r″ there, and repeats
//! until the trajectory is resolved past s_max.

use std::fmt::Write as _;

use super::jet::{
    initial_data, q_first_integral, residual_scale, residual_second_order, residual_rre06,
    residual_third_order, tau_prime, third_derivative, y_of_jet, PainleveJet, SINGULAR_GUARD,
};
use super::ode::{integrate, Control, Stop, Tolerances, Trajectory};
use super::series::SeriesStart;
use crate::error::{Error, Result};
use crate::limit_kernels::fmt17;

pub const MAX_S: f64 = 500.0;
pub const MIN_TOL: f64 = 1e-12;

/// Points where a solution always has a grid entry, when inside (s0, s_max].
const ANCHORS: [f64; 7] = [0.1, 1.0, 10.0, 50.0, 100.0, 200.0, 400.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub s0: f64,
    pub order: usize,
    pub points_per_decade: usize,
    /// Relative half-width of the difference stencil used for r‴ checks.
    pub fd_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            s0: 1e-3,
            order: 4,
            points_per_decade: 40,
            fd_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PainleveSolution {
    pub alpha: f64,
    pub lambda: f64,
    pub tol: f64,
    pub s0: f64,
    pub grid: Vec<f64>,
    /// r‴ in each jet comes from the differential equation.
    pub jets: Vec<PainleveJet>,
    pub q: Vec<f64>,
    pub tau: Vec<f64>,
    pub y: Vec<f64>,
    /// Third-order residual with r‴ from a difference stencil, over the scale.
    pub res31: Vec<f64>,
    /// Second-order integral residual over the scale.
    pub res_rre04: Vec<f64>,
    pub res_rre06: Vec<f64>,
    /// r‴ from the difference stencil.
    pub r3_fd: Vec<f64>,
    /// Number of shooting segments used.
    pub segments: usize,
}

impl PainleveSolution {
    /// Index of the grid point equal to `s` up to rounding.
    pub fn index_of(&self, s: f64) -> Option<usize> {
        self.grid.iter().position(|&g| (g - s).abs() <= 1e-12 * s.abs())
    }

    pub fn jet_at(&self, s: f64) -> Option<&PainleveJet> {
        self.index_of(s).map(|i| &self.jets[i])
    }

    /// Jet with the stencil r‴ in place of the equation's.
    pub fn fd_jet(&self, i: usize) -> PainleveJet {
        PainleveJet { r3: self.r3_fd[i], ..self.jets[i] }
    }

    pub fn max_res31(&self) -> f64 {
        self.res31.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_res_rre04(&self) -> f64 {
        self.res_rre04.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_res_rre06(&self) -> f64 {
        self.res_rre06.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV `s,r,rp,rpp,q,tau,y,res31,res_rre04` with `#` metadata lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# alpha={}", fmt17(self.alpha));
        let _ = writeln!(out, "# lambda={}", fmt17(self.lambda));
        let _ = writeln!(out, "# tol={}", fmt17(self.tol));
        let _ = writeln!(out, "# s0={}", fmt17(self.s0));
        out.push_str("# res31 and res_rre04 are divided by 1 + (s r'')^2\n");
        out.push_str("s,r,rp,rpp,q,tau,y,res31,res_rre04\n");
        for i in 0..self.grid.len() {
            let j = &self.jets[i];
            let cols = [
                j.s,
                j.r,
                j.r1,
                j.r2,
                self.q[i],
                self.tau[i],
                self.y[i],
                self.res31[i],
                self.res_rre04[i],
            ];
            let row: Vec<String> = cols.iter().map(|&v| fmt17(v)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn solve_r(alpha: f64, lambda: f64, s_max: f64, tol: f64) -> Result<PainleveSolution> {
    solve_r_with(alpha, lambda, s_max, tol, &SolveOptions::default())
}

pub fn solve_r_with(
    alpha: f64,
    lambda: f64,
    s_max: f64,
    tol: f64,
    opts: &SolveOptions,
) -> Result<PainleveSolution> {
    if !(s_max > opts.s0 && s_max <= MAX_S) {
        return Err(Error::domain("solve_r", format!("s_max = {s_max} outside (s0, 500]")));
    }
    if !(tol >= MIN_TOL) {
        return Err(Error::domain("solve_r", format!("tol = {tol} below 1e-12")));
    }
    if !(1..=200).contains(&opts.points_per_decade) || !(opts.fd_step > 0.0 && opts.fd_step < 1e-2) {
        return Err(Error::Config("solve_r: bad grid options".into()));
    }
    let series = SeriesStart::new(alpha, lambda, opts.order)?;
    if !(opts.s0 >= super::series::S0_RANGE.0 && opts.s0 <= super::series::S0_RANGE.1) {
        return Err(Error::domain("solve_r", format!("s0 = {} outside [1e-6, 1e-2]", opts.s0)));
    }
    let grid = output_grid(opts.s0, s_max, opts.points_per_decade);
    if lambda == 0.0 {
        return Ok(constant_solution(alpha, tol, opts.s0, grid, series.coeffs[0]));
    }
    let layout = Layout::new(&grid, opts.fd_step, (2.0 * s_max).max(100.0));
    let shooter = Shooter {
        alpha,
        lambda,
        sign: lambda.signum(),
        m: alpha + lambda,
        tol: Tolerances {
            rtol: tol,
            atol: 1e-3 * tol * tol,
            proximity: Some(|y: &[f64]| y[1].abs().min((2.0 * y[1] + 1.0).abs())),
            ..Tolerances::default()
        },
        layout: &layout,
        monotone_from: if alpha + lambda > 1.0 { 0.0 } else { 4.0 * (1.0 + (alpha + lambda).powi(2)) },
    };
    let (states, segments) = shooter.shoot(&series, opts.s0)?;
    Ok(assemble(alpha, lambda, tol, opts, &grid, &layout, &states, segments))
}

fn output_grid(s0: f64, s_max: f64, per_decade: usize) -> Vec<f64> {
    let decades = (s_max / s0).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let ratio = (s_max / s0).powf(1.0 / n as f64);
    let mut g: Vec<f64> = (0..n).map(|k| s0 * ratio.powi(k as i32)).collect();
    g.push(s_max);
    for &a in &ANCHORS {
        if a > s0 && a < s_max {
            g.push(a);
        }
    }
    g.sort_by(|a, b| a.total_cmp(b));
    // drop points crowding an anchor
    let min_gap = (ratio - 1.0) * 0.25;
    let mut out: Vec<f64> = Vec::with_capacity(g.len());
    for s in g {
        if let Some(&last) = out.last() {
            if s / last - 1.0 < min_gap {
                let anchored = ANCHORS.contains(&s) || s == s_max;
                if anchored {
                    out.pop();
                } else {
                    continue;
                }
            }
        }
        out.push(s);
    }
    out
}

/// All points the integrator lands on: grid, stencil neighbours, and a tail
/// beyond s_max used only to confirm the trajectory is resolved.
struct Layout {
    points: Vec<f64>,
    /// Position of each grid point in `points`.
    grid_idx: Vec<usize>,
    /// Indices in `points` that may serve as restart locations.
    restart_ok: Vec<bool>,
    s_max: f64,
}

impl Layout {
    fn new(grid: &[f64], h: f64, horizon: f64) -> Self {
        let mut pts: Vec<(f64, bool)> = Vec::new();
        let last = grid.len() - 1;
        // restarts happen only at the first point of a stencil, so that no
        // stencil straddles two shooting segments
        for (i, &s) in grid.iter().enumerate() {
            pts.push((s, false));
            if i == 0 {
                pts.push((s * (1.0 + h), false));
                pts.push((s * (1.0 + 2.0 * h), false));
            } else if i == last {
                pts.push((s * (1.0 - 2.0 * h), true));
                pts.push((s * (1.0 - h), false));
            } else {
                pts.push((s * (1.0 - h), true));
                pts.push((s * (1.0 + h), false));
            }
        }
        let s_max = grid[last];
        let mut s = s_max;
        while s < horizon {
            s = (s * 1.02).min(horizon);
            pts.push((s, true));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let points: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let restart_ok: Vec<bool> = pts.iter().map(|p| p.1).collect();
        let grid_idx = grid
            .iter()
            .map(|&g| points.iter().position(|&p| p == g).expect("grid point present"))
            .collect();
        Self {
            points,
            grid_idx,
            restart_ok,
            s_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fate {
    /// r′ collapsing towards 0.
    Rising,
    /// r′ running away from 0.
    Falling,
}

struct Run {
    fate: Fate,
    states: Vec<[f64; 4]>,
}

struct Shooter<'a> {
    alpha: f64,
    lambda: f64,
    sign: f64,
    m: f64,
    tol: Tolerances,
    layout: &'a Layout,
    /// From here on r″ keeps the sign of λ on the sought trajectory.
    monotone_from: f64,
}

impl Shooter<'_> {
    fn rhs(&self, s: f64, y: &[f64; 4]) -> Option<[f64; 4]> {
        let r3 = third_derivative(s, y[1], y[2], self.alpha, self.lambda).ok()?;
        let jet = PainleveJet::new(s, y[0], y[1], y[2], r3);
        let tp = tau_prime(&jet, self.lambda).ok()?;
        Some([y[1], y[2], r3, tp])
    }

    /// Typical size of r′ on the sought trajectory.
    fn envelope(&self, s: f64) -> f64 {
        self.lambda.abs() / (2.0 * self.m.max(s.sqrt()))
    }

    fn classify_point(&self, s: f64, y: &[f64; 4]) -> Option<Fate> {
        let g = self.sign * y[1];
        let e = self.envelope(s);
        if g > -0.05 * e {
            return Some(Fate::Rising);
        }
        if g < -3.0 * e - 0.1 || (2.0 * y[1] + 1.0).abs() < 1e-3 {
            return Some(Fate::Falling);
        }
        if self.sign * y[2] < 0.0 && s >= self.monotone_from {
            return Some(Fate::Falling);
        }
        None
    }

    /// Fate of a run that reached the horizon, judged against the large-s
    /// expansion r′ ≈ -λ/(2√s) - λ(1/8 - α²/2)/(2 s^{3/2}).
    fn classify_end(&self, s: f64, y: &[f64; 4]) -> Fate {
        let c = 0.125 - 0.5 * self.alpha * self.alpha;
        let expected = -self.lambda / (2.0 * s.sqrt()) - self.lambda * c / (2.0 * s.powf(1.5));
        if self.sign * (y[1] - expected) > 0.0 {
            Fate::Rising
        } else {
            Fate::Falling
        }
    }

    fn run(&self, start: usize, y0: [f64; 4]) -> Result<Run> {
        let cps = &self.layout.points[start..];
        let tr: Trajectory<4, Fate> = integrate(
            |s, y| self.rhs(s, y),
            cps[0],
            y0,
            cps,
            &self.tol,
            |s, y| match self.classify_point(s, y) {
                Some(f) => Control::Stop(f),
                None => Control::Continue,
            },
        )?;
        let fate = match tr.stop {
            None => self.classify_end(tr.last.0, &tr.last.1),
            Some(Stop::Observer(f)) => f,
            Some(Stop::Singular(_)) | Some(Stop::StepUnderflow(_)) => {
                let y = tr.last.1;
                if (y[1]).abs() < (2.0 * y[1] + 1.0).abs() {
                    Fate::Rising
                } else {
                    Fate::Falling
                }
            }
        };
        Ok(Run {
            fate,
            states: tr.checkpoints.into_iter().map(|c| c.1).collect(),
        })
    }

    /// States at every layout point up to s_max and the number of segments.
    fn shoot(&self, series: &SeriesStart, s0: f64) -> Result<(Vec<[f64; 4]>, usize)> {
        let d = initial_data(self.alpha, self.lambda)?;
        let tau_start = |c: f64| -> Result<[f64; 4]> {
            let jet = series.jet(s0, c)?;
            let k0 = d.r0p * (1.0 - 2.0 * d.r0);
            let tp0 = (self.lambda * self.lambda - k0 * k0) / (4.0 * d.r0p);
            let tp1 = tau_prime(&jet, self.lambda)?;
            Ok([jet.r, jet.r1, jet.r2, d.tau0 + 0.5 * s0 * (tp0 + tp1)])
        };

        let mut accepted: Vec<[f64; 4]> = Vec::new();
        let mut start = 0usize;
        let mut base = tau_start(0.0)?;
        let mut first = true;
        let mut segments = 0usize;
        loop {
            segments += 1;
            if segments > 400 {
                return Err(Error::SingularManifold { s: self.layout.points[start] });
            }
            let family = |delta: f64| -> Result<[f64; 4]> {
                if first {
                    tau_start(delta)
                } else {
                    let mut y = base;
                    y[2] += delta;
                    Ok(y)
                }
            };
            let width = if first {
                1e-6 * (1.0 + series.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())))
            } else {
                let s = self.layout.points[start];
                1e-12 * (base[2].abs() + base[1].abs() / s).max(1e-300)
            };
            let (lo, hi) = self.bisect(start, &family, width)?;
            let sep = separation(&lo.states, &hi.states);
            let sep_abs = start + sep;
            let s_sep = self.layout.points[sep_abs.min(self.layout.points.len() - 1)];
            if s_sep > self.layout.s_max * 1.05 {
                accepted.extend_from_slice(&lo.states);
                break;
            }
            // restart half-way (in s) towards the separation point
            let s_start = self.layout.points[start];
            let target = 0.5 * (s_start + s_sep);
            let mut restart = None;
            for j in (start + 1..sep_abs).rev() {
                if self.layout.restart_ok[j] && self.layout.points[j] <= target {
                    restart = Some(j);
                    break;
                }
            }
            let restart = match restart {
                Some(j) => j,
                None => match (start + 1..sep_abs).find(|&j| self.layout.restart_ok[j]) {
                    Some(j) => j,
                    None => return Err(Error::SingularManifold { s: s_sep }),
                },
            };
            let keep = restart - start;
            accepted.extend_from_slice(&lo.states[..keep]);
            base = lo.states[keep];
            start = restart;
            first = false;
        }
        let n_needed = self.layout.grid_idx.last().copied().unwrap_or(0) + 1;
        if accepted.len() < n_needed {
            return Err(Error::SingularManifold {
                s: self.layout.points[accepted.len().saturating_sub(1)],
            });
        }
        accepted.truncate(n_needed);
        Ok((accepted, segments))
    }

    /// Bisects the family down to adjacent floats; returns the two runs of
    /// different fate that bracket the trajectory.
    fn bisect<F>(&self, start: usize, family: &F, width: f64) -> Result<(Run, Run)>
    where
        F: Fn(f64) -> Result<[f64; 4]>,
    {
        let centre = self.run(start, family(0.0)?)?;
        let mut w = width;
        let mut other = None;
        for _ in 0..60 {
            for delta in [w, -w] {
                let r = self.run(start, family(delta)?)?;
                if r.fate != centre.fate {
                    other = Some((delta, r));
                    break;
                }
            }
            if other.is_some() {
                break;
            }
            w *= 4.0;
        }
        let Some((d_other, r_other)) = other else {
            return Err(Error::SingularManifold { s: self.layout.points[start] });
        };
        let (mut lo, mut hi) = if d_other > 0.0 {
            ((0.0, centre), (d_other, r_other))
        } else {
            ((d_other, r_other), (0.0, centre))
        };
        loop {
            let mid = 0.5 * (lo.0 + hi.0);
            let y_mid = family(mid)?;
            if y_mid == family(lo.0)? || y_mid == family(hi.0)? {
                return Ok((lo.1, hi.1));
            }
            let r = self.run(start, y_mid)?;
            if r.fate == lo.1.fate {
                lo = (mid, r);
            } else {
                hi = (mid, r);
            }
        }
    }
}

/// First index where the two runs disagree in r″ beyond 1e-8 relative, or
/// where one of them ends.
fn separation(a: &[[f64; 4]], b: &[[f64; 4]]) -> usize {
    let n = a.len().min(b.len());
    for i in 0..n {
        let scale = a[i][2].abs().max(b[i][2].abs()).max(1e-300);
        if (a[i][2] - b[i][2]).abs() > 1e-8 * scale || (a[i][1] - b[i][1]).abs() > 1e-8 * a[i][1].abs() {
            return i;
        }
    }
    n
}

fn constant_solution(alpha: f64, tol: f64, s0: f64, grid: Vec<f64>, r0: f64) -> PainleveSolution {
    let n = grid.len();
    let jets: Vec<PainleveJet> = grid.iter().map(|&s| PainleveJet::new(s, r0, 0.0, 0.0, 0.0)).collect();
    let d = initial_data(alpha, 0.0).expect("validated by the series start");
    PainleveSolution {
        alpha,
        lambda: 0.0,
        tol,
        s0,
        q: jets.iter().map(|j| q_first_integral(j, 0.0)).collect(),
        tau: vec![d.tau0; n],
        y: vec![0.0; n],
        res31: vec![0.0; n],
        res_rre04: vec![0.0; n],
        res_rre06: vec![0.0; n],
        r3_fd: vec![0.0; n],
        jets,
        grid,
        segments: 0,
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    alpha: f64,
    lambda: f64,
    tol: f64,
    opts: &SolveOptions,
    grid: &[f64],
    layout: &Layout,
    states: &[[f64; 4]],
    segments: usize,
) -> PainleveSolution {
    let n = grid.len();
    let mut sol = PainleveSolution {
        alpha,
        lambda,
        tol,
        s0: opts.s0,
        grid: grid.to_vec(),
        jets: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
        tau: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        res31: Vec::with_capacity(n),
        res_rre04: Vec::with_capacity(n),
        res_rre06: Vec::with_capacity(n),
        r3_fd: Vec::with_capacity(n),
        segments,
    };
    let h = opts.fd_step;
    for (i, &s) in grid.iter().enumerate() {
        let k = layout.grid_idx[i];
        let st = states[k];
        let r3_ode = third_derivative(s, st[1], st[2], alpha, lambda).unwrap_or(f64::NAN);
        let r3_fd = if i == 0 {
            (-3.0 * st[2] + 4.0 * states[k + 1][2] - states[k + 2][2]) / (2.0 * s * h)
        } else if i == n - 1 {
            (3.0 * st[2] - 4.0 * states[k - 1][2] + states[k - 2][2]) / (2.0 * s * h)
        } else {
            (states[k + 1][2] - states[k - 1][2]) / (2.0 * s * h)
        };
        let jet = PainleveJet::new(s, st[0], st[1], st[2], r3_ode);
        let fd = PainleveJet { r3: r3_fd, ..jet };
        let scale = residual_scale(&jet);
        sol.q.push(q_first_integral(&jet, 0.0));
        sol.tau.push(st[3]);
        sol.y.push(y_of_jet(&jet).map(|v| v.0).unwrap_or(f64::NAN));
        sol.res31.push(residual_third_order(&fd, alpha, lambda) / scale);
        sol.res_rre04.push(residual_second_order(&jet, alpha, lambda, 0.0) / scale);
        sol.res_rre06.push(residual_rre06(&fd, alpha, lambda, 0.0) / scale);
        sol.r3_fd.push(r3_fd);
        sol.jets.push(jet);
    }
    debug_assert!(sol.jets.iter().all(|j| j.r1.abs() >= SINGULAR_GUARD));
    sol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_contains_anchors_and_ends() {
        let g = output_grid(1e-3, 400.0, 40);
        assert_eq!(g[0], 1e-3);
        assert_eq!(*g.last().unwrap(), 400.0);
        for a in [1.0, 100.0, 200.0] {
            assert!(g.contains(&a));
        }
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn lambda_zero_constant_trajectory() {
        let sol = solve_r(1.0, 0.0, 10.0, 1e-12).unwrap();
        assert!(sol.jets.iter().all(|j| (j.r + 0.375).abs() < 1e-10));
    }

    #[test]
    fn argument_checks() {
        assert!(solve_r(1.5, 0.5, 600.0, 1e-12).is_err());
        assert!(solve_r(1.5, 0.5, 10.0, 1e-13).is_err());
    }

    #[test]
    fn short_trajectory_residuals() {
        let sol = solve_r(1.5, 0.5, 10.0, 1e-12).unwrap();
        assert!(sol.max_res31() < 1e-8, "{:e}", sol.max_res31());
        assert!(sol.max_res_rre04() < 1e-6, "{:e}", sol.max_res_rre04());
    }
}
