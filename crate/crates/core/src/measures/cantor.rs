//! The Cantor–Lebesgue measure on the middle-thirds Cantor set.

use num_complex::Complex64;

use std::f64::consts::TAU;

use crate::error::{invalid, Result};
use crate::fourier::FourierSeq;

/// Factors beyond this depth are 1 to double precision for any index that
/// fits in memory.
pub const DEFAULT_CANTOR_DEPTH: usize = 64;

/// `mu(n) = prod_{k>=1} exp(-2 pi i n 3^-k) cos(2 pi n 3^-k)`.
///
/// The phases multiply to `exp(-pi i n) = (-1)^n` exactly, so only the cosine
/// product is truncated at `depth`; the result is real.
///
/// Each factor is evaluated at the fractional part of `n / 3^k`: from the
/// exact integer residue while `3^k <= n`, then `n / 3^k` once, then by
/// repeated division by 3. Both steps round the same rational the same way
/// for `n` and `3n`, so `mu(3n)` and `mu(n)` share their factors bit for bit.
pub fn cantor_coeffs(n_out: usize, depth: usize) -> Result<FourierSeq> {
    if depth < 1 {
        return Err(invalid("depth", "must be at least 1"));
    }
    if n_out == 0 {
        return Err(invalid("n_out", "must be positive"));
    }
    let nonneg: Vec<Complex64> = (0..=n_out as u64).map(|n| cantor_coeff(n, depth)).collect();
    FourierSeq::from_nonnegative(&nonneg)
}

fn cantor_coeff(n: u64, depth: usize) -> Complex64 {
    let mut c = 1.0f64;
    let mut pow = 1u64;
    let mut tail: Option<f64> = None;
    for _ in 0..depth {
        let turn = match tail {
            Some(t) => t / 3.0,
            None => {
                pow *= 3;
                if pow > n {
                    n as f64 / pow as f64
                } else {
                    (n % pow) as f64 / pow as f64
                }
            }
        };
        if pow > n {
            tail = Some(turn);
        }
        c *= (TAU * turn).cos();
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Complex64::new(sign * c, 0.0)
}
