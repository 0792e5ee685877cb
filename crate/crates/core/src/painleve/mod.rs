//! The third-order equation for r(s), its first integrals, the associated
//! fifth Painlevé transcendent and the Lax matrices.

mod jet;
mod lax;
pub mod ode;
mod series;
mod solve;

pub use jet::{
    initial_data, pv_residual, q_first_integral, q_from_jet, q_prime, residual_rre06,
    residual_scale, residual_second_order, residual_third_order, tau_prime, third_derivative,
    y_of_jet, InitialData, PainleveJet, SINGULAR_GUARD,
};
pub use lax::{det, lax_matrices, mat_mul, trace, LaxMatrices, Mat2};
pub use series::{leading_factor, series_start, SeriesStart};
pub use solve::{solve_r, solve_r_with, PainleveSolution, SolveOptions, MAX_S, MIN_TOL};
