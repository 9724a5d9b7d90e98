//! Singular measures, finite-level iceberg-type `Z^d` actions, and
//! statistical diagnostics for the decay of their Fourier coefficients.
//!
//! * [`measures`]: Riesz products, the Cantor–Lebesgue measure and atomic
//!   measures, with Fourier coefficients by closed form and by quadrature.
//! * [`iceberg`]: lattice towers `h_{n+1} = q_n h_n`, rotation families,
//!   lifted cylindric functions and their circular correlations.
//! * [`ensemble`]: Monte Carlo moments of correlations over random rotation
//!   families and the tests built on them.
//! * [`analysis`]: decay-exponent estimation and summary diagnostics.

pub mod analysis;
pub mod ensemble;
mod error;
pub mod exact_sum;
mod fft;
pub mod fourier;
pub mod iceberg;
pub mod io;
pub mod measures;

pub use error::{Error, Result};
pub use fourier::FourierSeq;
