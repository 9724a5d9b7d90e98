use std::io::{self, Write};

use crate::error::{invalid, Result};
use crate::exact_sum::ExactSum;
use crate::io::write_lattice_real;

/// Tolerance on the normalization `mean(samples) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability density sampled on the uniform grid of `[0, 1)^d`,
/// `grid_size` points per axis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    dimension: usize,
    grid_size: usize,
    samples: Vec<f64>,
}

impl GridDensity {
    pub fn new(dimension: usize, grid_size: usize, samples: Vec<f64>) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension", "must be positive"));
        }
        if !grid_size.is_power_of_two() {
            return Err(invalid("grid_size", format!("{grid_size} is not a power of two")));
        }
        let cells = grid_size.checked_pow(dimension as u32).ok_or_else(|| invalid("grid_size", "grid too large"))?;
        if samples.len() != cells {
            return Err(crate::Error::ShapeMismatch { expected: cells, actual: samples.len() });
        }
        if let Some(bad) = samples.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(invalid("samples", format!("negative or non-finite sample {bad}")));
        }
        let mean = samples.iter().copied().collect::<ExactSum>().value() / cells as f64;
        if (mean - 1.0).abs() > NORMALIZATION_TOL {
            return Err(invalid("samples", format!("mean {mean} is not 1")));
        }
        Ok(Self { dimension, grid_size, samples })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().copied().collect::<ExactSum>().value() / self.samples.len() as f64
    }

    /// Mass of each grid cell, summing to one.
    pub fn cell_masses(&self) -> Vec<f64> {
        let n = self.samples.len() as f64;
        self.samples.iter().map(|s| s / n).collect()
    }

    /// CSV with columns `x,density` (or `x1,x2,...,density`), `x` being the
    /// grid index.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write_lattice_real(w, "x", "density", self.grid_size, self.dimension, &self.samples)
    }
}
