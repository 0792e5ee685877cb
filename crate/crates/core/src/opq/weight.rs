use crate::error::{Error, Result};

/// Parameters of the weight (x + t)^λ x^α e^{-x} on (0, ∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    alpha: f64,
    lambda: f64,
    t: f64,
}

impl WeightParams {
    pub fn new(alpha: f64, lambda: f64, t: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain("WeightParams", format!("alpha = {alpha} must be positive")));
        }
        if !(alpha + lambda + 1.0 > 0.0) || !lambda.is_finite() {
            return Err(Error::domain(
                "WeightParams",
                format!("alpha + lambda + 1 = {} must be positive", alpha + lambda + 1.0),
            ));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain("WeightParams", format!("t = {t} must be positive")));
        }
        Ok(Self { alpha, lambda, t })
    }

    /// Classical Laguerre weight x^α e^{-x} (λ = 0; t is then irrelevant).
    pub fn classical(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn is_classical(&self) -> bool {
        self.lambda == 0.0
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.alpha, self.lambda, t)
    }

    /// ln w(x).
    pub fn ln_weight(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("weight_eval", format!("x = {x} must be positive")));
        }
        Ok(self.ln_weight_unchecked(x))
    }

    pub(crate) fn ln_weight_unchecked(&self, x: f64) -> f64 {
        let perturb = if self.lambda == 0.0 {
            0.0
        } else {
            self.lambda * (x + self.t).ln()
        };
        perturb + self.alpha * x.ln() - x
    }

    /// ln (x + t)^λ, the factor not absorbed by a Gauss-Laguerre rule.
    pub(crate) fn ln_perturbation(&self, x: f64) -> f64 {
        if self.lambda == 0.0 {
            0.0
        } else {
            self.lambda * (x + self.t).ln()
        }
    }
}

/// w(x) = (x + t)^λ x^α e^{-x}. Underflows to 0 for large x; use
/// [`WeightParams::ln_weight`] there.
pub fn weight_eval(x: f64, p: &WeightParams) -> Result<f64> {
    Ok(p.ln_weight(x)?.exp())
}
