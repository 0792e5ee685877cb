use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: domain error ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("{func}: result overflows double precision at x = {x}")]
    Overflow { func: &'static str, x: f64 },

    #[error("tridiagonal eigensolver did not converge at index {index}")]
    EigenNoConvergence { index: usize },

    #[error("quadrature did not converge: orders {low} and {high} disagree by {rel_diff:e}")]
    QuadratureMismatch { low: usize, high: usize, rel_diff: f64 },

    #[error("precision exhausted: recurrence coefficient b_{index} = {value:e} is not positive")]
    PrecisionExhausted { index: usize, value: f64 },

    #[error("singular manifold r'(2r'+1) = 0 approached at s = {s}")]
    SingularManifold { s: f64 },

    #[error("step size underflow at s = {s}")]
    StepUnderflow { s: f64 },

    #[error("series start: order matching degenerate at order {order}")]
    SeriesDegenerate { order: usize },

    #[error("{what} vanishes (value {value:e})")]
    Pole { what: &'static str, value: f64 },

    #[error("regime error: {0}")]
    Regime(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// True for errors that come from a numerical singularity rather than bad input.
    pub fn is_singularity(&self) -> bool {
        matches!(
            self,
            Error::SingularManifold { .. }
                | Error::StepUnderflow { .. }
                | Error::SeriesDegenerate { .. }
                | Error::Overflow { .. }
                | Error::Pole { .. }
                | Error::PrecisionExhausted { .. }
                | Error::EigenNoConvergence { .. }
                | Error::QuadratureMismatch { .. }
        )
    }
}
