pub mod error;
pub mod experiments;
pub mod limit_kernels;
pub mod opq;
pub mod painleve;
pub mod phi_kernel;
pub mod specfun;

pub use error::{Error, Result};
