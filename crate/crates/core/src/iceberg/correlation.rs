use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tower::Tower;
use crate::error::{Error, Result};
use crate::fft::forward;
use crate::io::{unravel, write_lattice_complex, write_lattice_real};

/// `R(t) = (1 / h^d) sum_x f(x - t) conj(f(x))` on `M_m = (Z / h Z)^d`,
/// row-major in `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeq {
    level: usize,
    side: usize,
    dimension: usize,
    values: Vec<Complex64>,
    norm0: f64,
}

impl CorrelationSeq {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `R(0) = mean |f|^2`.
    pub fn norm0(&self) -> f64 {
        self.norm0
    }

    /// `max |R(t)|` over lags of sup-norm `r`, for `r = 1..=side/2`.
    pub fn envelope(&self) -> Vec<f64> {
        let abs: Vec<f64> = self.values.iter().map(|v| v.norm()).collect();
        lag_envelope(&abs, self.side, self.dimension)
    }

    /// CSV with columns `t,re,im,abs` (or `t1,t2,...`).
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        write_lattice_complex(w, "t", self.side, self.dimension, &self.values)
    }
}

/// Correlation of `values`, a function on `M_level` of `tower`.
pub fn correlation(tower: &Tower, level: usize, values: &[Complex64]) -> Result<CorrelationSeq> {
    tower.check_level(level)?;
    tower.check_supported_dimension()?;
    check_len(tower, level, values)?;
    let side = tower.height(level) as usize;
    let dimension = tower.dimension();
    let values = circular_correlation(values, side, dimension);
    let norm0 = values[0].re;
    Ok(CorrelationSeq { level, side, dimension, values, norm0 })
}

/// `R(t)` for a `side^dim` row-major array, as `DFT(|DFT f|^2) / N^2` with
/// `N = side^dim`. Inputs that are real, or purely imaginary, give exactly
/// real outputs.
pub fn circular_correlation(values: &[Complex64], side: usize, dim: usize) -> Vec<Complex64> {
    let weights = power_weights(values, side, dim);
    let mut out: Vec<Complex64> = weights.into_iter().map(|w| Complex64::new(w, 0.0)).collect();
    forward(&mut out, side, dim);
    if is_real_up_to_i(values) {
        for v in &mut out {
            v.im = 0.0;
        }
    }
    out
}

fn is_real_up_to_i(values: &[Complex64]) -> bool {
    values.iter().all(|v| v.im == 0.0) || values.iter().all(|v| v.re == 0.0)
}

/// `|F(k)|^2 / N^2` where `F` is the unnormalized forward DFT.
///
/// A purely imaginary input is first multiplied by `-i` (an exact swap);
/// this leaves the weights unchanged in exact arithmetic and makes them
/// bitwise identical to those of the real function.
fn power_weights(values: &[Complex64], side: usize, dim: usize) -> Vec<f64> {
    let n = values.len() as f64;
    let mut spectrum: Vec<Complex64> = if values.iter().all(|v| v.re == 0.0) {
        values.iter().map(|v| Complex64::new(v.im, 0.0)).collect()
    } else {
        values.to_vec()
    };
    forward(&mut spectrum, side, dim);
    spectrum.iter().map(|c| c.norm_sqr() / (n * n)).collect()
}

fn check_len(tower: &Tower, level: usize, values: &[Complex64]) -> Result<()> {
    let expected = tower.points(level);
    if values.len() != expected {
        return Err(Error::ShapeMismatch { expected, actual: values.len() });
    }
    Ok(())
}

/// Finite-level spectral measure: weights `w(k) = |F(k)|^2 / N^2` on the dual
/// group `(Z / h Z)^d`, so that `R(t) = sum_k w(k) exp(-2 pi i <k, t> / h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    level: usize,
    side: usize,
    dimension: usize,
    weights: Vec<f64>,
}

impl SpectralDensity {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().copied().collect::<crate::exact_sum::ExactSum>().value()
    }

    /// The correlation sequence these weights are the transform of.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
        forward(&mut out, self.side, self.dimension);
        out
    }

    /// CSV with columns `k,weight` (or `k1,k2,...`).
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        write_lattice_real(w, "k", "weight", self.side, self.dimension, &self.weights)
    }
}

pub fn spectral_density(tower: &Tower, level: usize, values: &[Complex64]) -> Result<SpectralDensity> {
    tower.check_level(level)?;
    tower.check_supported_dimension()?;
    check_len(tower, level, values)?;
    let side = tower.height(level) as usize;
    let dimension = tower.dimension();
    Ok(SpectralDensity { level, side, dimension, weights: power_weights(values, side, dimension) })
}

/// Sup-norm of the centred representative of lag index `idx`:
/// `max_i min(t_i, side - t_i)`.
pub fn lag_norm(idx: usize, side: usize, dim: usize) -> usize {
    unravel(idx, side, dim).into_iter().map(|c| c.min(side - c)).max().unwrap_or(0)
}

/// `max values[t]` over lags with `lag_norm(t) = r`, for `r = 1..=side/2`
/// (entry `r - 1`).
pub fn lag_envelope(values: &[f64], side: usize, dim: usize) -> Vec<f64> {
    let mut env = vec![0.0f64; side / 2];
    for (idx, &v) in values.iter().enumerate() {
        let r = lag_norm(idx, side, dim);
        if r >= 1 {
            env[r - 1] = env[r - 1].max(v);
        }
    }
    env
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iceberg::{build_tower, TowerSpec};

    fn c(values: &[f64]) -> Vec<Complex64> {
        values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    #[test]
    fn morse_word_by_hand() {
        let tower = build_tower(&TowerSpec::new(1, 2, vec![2])).unwrap();
        let f = c(&[1.0, -1.0, -1.0, 1.0]);
        let r = correlation(&tower, 2, &f).unwrap();
        let re: Vec<f64> = r.values().iter().map(|v| v.re).collect();
        for (got, want) in re.iter().zip([1.0, 0.0, -1.0, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(r.norm0(), 1.0);
        let s = spectral_density(&tower, 2, &f).unwrap();
        for (got, want) in s.weights().iter().zip([0.0, 0.5, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn constants() {
        let tower = build_tower(&TowerSpec::new(2, 3, vec![2])).unwrap();
        let v = Complex64::new(0.6, 0.8);
        let r = correlation(&tower, 2, &vec![v; 36]).unwrap();
        assert!(r.values().iter().all(|x| (x - Complex64::new(1.0, 0.0)).norm() < 1e-14));
        let s = spectral_density(&tower, 2, &vec![v; 36]).unwrap();
        assert!((s.weights()[0] - 1.0).abs() < 1e-14);
        assert!(s.weights()[1..].iter().all(|&w| w < 1e-28));
    }

    #[test]
    fn shape_checked() {
        let tower = build_tower(&TowerSpec::new(1, 2, vec![2])).unwrap();
        assert!(matches!(correlation(&tower, 2, &c(&[1.0; 3])), Err(Error::ShapeMismatch { .. })));
        assert!(spectral_density(&tower, 3, &c(&[1.0; 8])).is_err());
    }

    #[test]
    fn lag_norms() {
        assert_eq!(lag_norm(0, 8, 1), 0);
        assert_eq!(lag_norm(7, 8, 1), 1);
        assert_eq!(lag_norm(4, 8, 1), 4);
        // (1, 6) in an 8x8 grid has centred representative (1, -2).
        assert_eq!(lag_norm(14, 8, 2), 2);
        assert_eq!(lag_envelope(&[9.0, 1.0, 3.0, 2.0], 4, 1), vec![2.0, 3.0]);
    }
}
