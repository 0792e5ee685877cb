//! Special functions: Gamma, Bessel J/I/K of real order, Airy Ai.

mod airy;
mod bessel;
pub mod dd;
mod gamma;

pub use airy::{airy_ai, airy_ai_prime, airy_pair};
pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_j, bessel_j_prime, bessel_k, bessel_k_connection,
    bessel_k_scaled, bessel_k_scaled_asymptotic, j_pair,
};
pub use dd::DoubleDouble;
pub use gamma::{gamma_fn, ln_gamma, recip_gamma};
