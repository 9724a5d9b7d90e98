//! Classical measures on `[0, 1)` and their Fourier coefficients.
//!
//! Coefficients use the kernel `exp(-2 pi i n x)` throughout. Frequencies of
//! Riesz factors are stored as integers `k` (the angular frequency is
//! `2 pi k`).

mod atomic;
mod cantor;
mod density;
mod riesz;

pub use atomic::{atomic_coeffs, Atom, AtomicMeasure};
pub use cantor::{cantor_coeffs, DEFAULT_CANTOR_DEPTH};
pub use density::GridDensity;
pub use riesz::{riesz_coeffs_lacunary, riesz_coeffs_quadrature, riesz_density, RieszSpec};

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `exp(-2 pi i x)`, reducing `x` modulo 1 first. Quarter turns are exact.
pub(crate) fn unit_phase(x: f64) -> Complex64 {
    let r = x.rem_euclid(1.0);
    match r {
        0.0 => Complex64::new(1.0, 0.0),
        0.25 => Complex64::new(0.0, -1.0),
        0.5 => Complex64::new(-1.0, 0.0),
        0.75 => Complex64::new(0.0, 1.0),
        _ => {
            let (s, c) = (TAU * r).sin_cos();
            Complex64::new(c, -s)
        }
    }
}
