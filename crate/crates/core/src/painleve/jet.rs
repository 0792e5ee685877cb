use crate::error::{Error, Result};

/// r(s) and its first three derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PainleveJet {
    pub s: f64,
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

/// Relative size of r′(2r′+1) below which a jet counts as singular.
pub const SINGULAR_GUARD: f64 = 1e-12;

impl PainleveJet {
    pub fn new(s: f64, r: f64, r1: f64, r2: f64, r3: f64) -> Self {
        Self { s, r, r1, r2, r3 }
    }

    /// Fails when r′ or 2r′+1 is too close to zero to divide by.
    pub fn check_regular(&self) -> Result<()> {
        if self.r1.abs() < SINGULAR_GUARD || (2.0 * self.r1 + 1.0).abs() < SINGULAR_GUARD {
            return Err(Error::SingularManifold { s: self.s });
        }
        Ok(())
    }
}

/// (r0, r′(0), q(0), tau(0), y(0)) at the hard edge s = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub r0: f64,
    pub r0p: f64,
    pub q0: f64,
    pub tau0: f64,
    pub y0: f64,
}

pub fn initial_data(alpha: f64, lambda: f64) -> Result<InitialData> {
    let m = alpha + lambda;
    if !(alpha > 0.0) || !(m > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(
            "initial_data",
            format!("need alpha > 0 and alpha + lambda > 0, got ({alpha}, {lambda})"),
        ));
    }
    let m2 = 4.0 * m * m;
    Ok(InitialData {
        r0: (1.0 - m2) / 8.0,
        r0p: -lambda / (2.0 * m),
        q0: (m2 - 1.0) * (m2 - 9.0) / 128.0,
        tau0: (m2 - 1.0) * (m2 - 9.0) * (m2 - 13.0) / 1536.0,
        y0: -lambda / alpha,
    })
}

/// Left side of the third-order equation for r.
pub fn residual_third_order(jet: &PainleveJet, alpha: f64, lambda: f64) -> f64 {
    let PainleveJet { s, r1, r2, r3, .. } = *jet;
    let g = 2.0 * r1 + 1.0;
    8.0 * s * s * r1 * g * r3 - 4.0 * s * s * (1.0 + 4.0 * r1) * r2 * r2 + 8.0 * s * r1 * g * r2
        - 4.0 * s * r1 * r1 * g * g
        + lambda * lambda * g * g
        - 4.0 * alpha * alpha * r1 * r1
}

/// Left side of the second-order integral with constant c1.
pub fn residual_second_order(jet: &PainleveJet, alpha: f64, lambda: f64, c1: f64) -> f64 {
    let PainleveJet { s, r, r1, r2, .. } = *jet;
    let (a2, l2) = (alpha * alpha, lambda * lambda);
    s * s * r2 * r2 - 2.0 * s * r1.powi(3) + (2.0 * r + 2.0 * c1 - s - 0.25) * r1 * r1
        + (r + 0.5 * a2 + c1 - 0.125 - 0.5 * l2) * r1
        - 0.25 * l2
}

/// Left side of the companion third-order equation with constant c1.
pub fn residual_rre06(jet: &PainleveJet, _alpha: f64, lambda: f64, c1: f64) -> f64 {
    let PainleveJet { s, r, r1, r2, r3 } = *jet;
    8.0 * s * s * r1 * r3 - 4.0 * s * s * r2 * r2 + 8.0 * s * r1 * r2 - 16.0 * s * r1.powi(3)
        + (8.0 * r - 4.0 * s - 1.0 + 8.0 * c1) * r1 * r1
        + lambda * lambda
}

/// Normalisation used by the solver's residual checks, 1 + (s r″)².
pub fn residual_scale(jet: &PainleveJet) -> f64 {
    1.0 + (jet.r2 * jet.s).powi(2)
}

/// r‴ solved from the third-order equation.
pub fn third_derivative(s: f64, r1: f64, r2: f64, alpha: f64, lambda: f64) -> Result<f64> {
    let g = 2.0 * r1 + 1.0;
    let den = 8.0 * s * s * r1 * g;
    if den.abs() < SINGULAR_GUARD * s * s {
        return Err(Error::SingularManifold { s });
    }
    let num = 4.0 * s * s * (1.0 + 4.0 * r1) * r2 * r2 - 8.0 * s * r1 * g * r2 + 4.0 * s * r1 * r1 * g * g
        - lambda * lambda * g * g
        + 4.0 * alpha * alpha * r1 * r1;
    Ok(num / den)
}

/// q from the first integral, −s r′ + (r² + r)/2 + c1.
pub fn q_first_integral(jet: &PainleveJet, c1: f64) -> f64 {
    -jet.s * jet.r1 + 0.5 * (jet.r * jet.r + jet.r) + c1
}

/// q reconstructed from r, r′, r″ alone.
pub fn q_from_jet(jet: &PainleveJet, alpha: f64, lambda: f64) -> Result<f64> {
    jet.check_regular()?;
    let PainleveJet { s, r, r1, r2, .. } = *jet;
    let (a2, l2) = (alpha * alpha, lambda * lambda);
    let num = 8.0 * s * s * r2 * r2
        - r1 * (4.0 * r * (r - 1.0) * (2.0 * r1 + 1.0) + 2.0 * r1 + 4.0 * l2 - 4.0 * a2 + 1.0)
        - 2.0 * l2;
    Ok(-num / (8.0 * r1 * (2.0 * r1 + 1.0)))
}

/// q′ = −s r″ + r′ r − r′/2.
pub fn q_prime(jet: &PainleveJet) -> f64 {
    -jet.s * jet.r2 + jet.r1 * jet.r - 0.5 * jet.r1
}

/// tau′ = (λ² − (2 s r″ − 2 r′ r + r′)²) / (4 r′).
pub fn tau_prime(jet: &PainleveJet, lambda: f64) -> Result<f64> {
    if jet.r1.abs() < SINGULAR_GUARD {
        return Err(Error::SingularManifold { s: jet.s });
    }
    let k = 2.0 * jet.s * jet.r2 - 2.0 * jet.r1 * jet.r + jet.r1;
    Ok((lambda * lambda - k * k) / (4.0 * jet.r1))
}

/// y = 2r′/(1+2r′) with its first two derivatives.
pub fn y_of_jet(jet: &PainleveJet) -> Result<(f64, f64, f64)> {
    let g = 1.0 + 2.0 * jet.r1;
    if g.abs() < SINGULAR_GUARD {
        return Err(Error::Pole {
            what: "1 + 2r'",
            value: g,
        });
    }
    let y = 2.0 * jet.r1 / g;
    let yp = 2.0 * jet.r2 / (g * g);
    let ypp = 2.0 * jet.r3 / (g * g) - 8.0 * jet.r2 * jet.r2 / (g * g * g);
    Ok((y, yp, ypp))
}

/// Residual of the fifth Painlevé equation with parameters (α²/2, −λ²/2, 1/2, 0).
pub fn pv_residual(y: f64, yp: f64, ypp: f64, s: f64, alpha: f64, lambda: f64) -> Result<f64> {
    if y.abs() < 1e-10 {
        return Err(Error::Pole { what: "y", value: y });
    }
    if (y - 1.0).abs() < 1e-10 {
        return Err(Error::Pole { what: "y - 1", value: y - 1.0 });
    }
    if !(s > 0.0) {
        return Err(Error::domain("pv_residual", format!("s = {s} must be positive")));
    }
    let (a2, l2) = (alpha * alpha, lambda * lambda);
    Ok(ypp - (0.5 / y + 1.0 / (y - 1.0)) * yp * yp + yp / s
        - (y - 1.0).powi(2) * (a2 * y - l2 / y) / (2.0 * s * s)
        - y / (2.0 * s))
}
