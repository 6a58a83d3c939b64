//! Optimal mean-squared filtering error for the linear system driven by
//! fractional Brownian noises: exact covariance kernels, the complex
//! structural function and its zeros, closed-form large-time limits,
//! small-noise scaling laws, and an exact finite-horizon Gaussian
//! conditioning oracle.

pub mod error;
pub mod kernels;
pub mod params;
pub mod quadrature;
pub mod structural;

pub use error::{Error, Result};
pub use params::ModelParams;
