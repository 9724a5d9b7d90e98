//! Multidimensional FFT on row-major cubic arrays `[side; dim]`.
//!
//! The planner is created per call; nothing is shared between threads.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place unnormalized DFT along every axis of a `side^dim` array:
/// `X(k) = sum_x x(x) exp(-+2 pi i <k, x> / side)`.
pub(crate) fn fft_nd(data: &mut [Complex64], side: usize, dim: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), side.pow(dim as u32));
    if side <= 1 {
        return;
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(side, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::default(); side];
    for axis in 0..dim {
        // Elements along `axis` are `stride` apart.
        let stride = side.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(side) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * side;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

pub(crate) fn forward(data: &mut [Complex64], side: usize, dim: usize) {
    fft_nd(data, side, dim, FftDirection::Forward);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn naive_2d(x: &[Complex64], side: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); side * side];
        for k1 in 0..side {
            for k2 in 0..side {
                let mut acc = Complex64::default();
                for x1 in 0..side {
                    for x2 in 0..side {
                        let phase = -TAU * ((k1 * x1 + k2 * x2) % side) as f64 / side as f64;
                        acc += x[x1 * side + x2] * Complex64::from_polar(1.0, phase);
                    }
                }
                out[k1 * side + k2] = acc;
            }
        }
        out
    }

    #[test]
    fn two_dimensional_matches_naive() {
        let side = 6;
        let x: Vec<Complex64> =
            (0..side * side).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos())).collect();
        let mut fast = x.clone();
        forward(&mut fast, side, 2);
        for (a, b) in fast.iter().zip(naive_2d(&x, side)) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
