//! Exact and approximate laws of the largest eigenvalue of real and complex
//! Wishart matrices and of GOE/GUE matrices.

pub mod curve;
pub mod ensemble;
pub mod error;
pub mod gaussian;
mod mp;
mod roots;
pub mod sampler;
pub mod skewlin;
pub mod specfun;
pub mod tw_gamma;
pub mod wishart;

pub use curve::{CdfCurve, Method};
pub use ensemble::{EnsembleKind, EnsembleSpec};
pub use error::{Error, Result};
pub use mp::Precision;
