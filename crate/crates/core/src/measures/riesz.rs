//! Classical Riesz products `prod_n (1 + a_n cos(2 pi k_n x + phi_n))`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::GridDensity;
use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::fourier::FourierSeq;

/// Parameters of a truncated Riesz product.
///
/// Amplitudes lie in `(0, 1]`, frequencies are strictly increasing positive
/// integers, phases are arbitrary reals (reduced modulo `2 pi` on use).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRiesz", into = "RawRiesz")]
pub struct RieszSpec {
    amplitudes: Vec<f64>,
    frequencies: Vec<u64>,
    phases: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRiesz {
    amplitudes: Vec<f64>,
    frequencies: Vec<u64>,
    #[serde(default)]
    phases: Option<Vec<f64>>,
}

impl TryFrom<RawRiesz> for RieszSpec {
    type Error = Error;
    fn try_from(raw: RawRiesz) -> Result<Self> {
        let phases = raw.phases.unwrap_or_else(|| vec![0.0; raw.amplitudes.len()]);
        RieszSpec::new(raw.amplitudes, raw.frequencies, phases)
    }
}

impl From<RieszSpec> for RawRiesz {
    fn from(s: RieszSpec) -> Self {
        RawRiesz { amplitudes: s.amplitudes, frequencies: s.frequencies, phases: Some(s.phases) }
    }
}

impl RieszSpec {
    pub fn new(amplitudes: Vec<f64>, frequencies: Vec<u64>, phases: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("Riesz product needs at least one factor"));
        }
        if frequencies.len() != amplitudes.len() || phases.len() != amplitudes.len() {
            return Err(invalid(
                "frequencies/phases",
                format!(
                    "lengths differ: {} amplitudes, {} frequencies, {} phases",
                    amplitudes.len(),
                    frequencies.len(),
                    phases.len()
                ),
            ));
        }
        if let Some((i, a)) = amplitudes.iter().enumerate().find(|(_, a)| !(**a > 0.0 && **a <= 1.0)) {
            return Err(invalid("amplitudes", format!("a[{i}] = {a} is outside (0, 1]")));
        }
        if frequencies[0] == 0 {
            return Err(invalid("frequencies", "k[0] must be positive"));
        }
        if let Some(i) = frequencies.windows(2).position(|w| w[1] <= w[0]) {
            return Err(invalid(
                "frequencies",
                format!("not strictly increasing at index {i}: {} then {}", frequencies[i], frequencies[i + 1]),
            ));
        }
        if let Some((i, p)) = phases.iter().enumerate().find(|(_, p)| !p.is_finite()) {
            return Err(invalid("phases", format!("phi[{i}] = {p} is not finite")));
        }
        Ok(Self { amplitudes, frequencies, phases })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.frequencies
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Truncation level `N` (number of factors).
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `sum k_n`: the trigonometric degree of the product.
    pub fn degree(&self) -> u64 {
        self.frequencies.iter().sum()
    }

    /// First index `n` with `k[n+1] <= 3 k[n]`, if any.
    pub fn lacunarity_violation(&self) -> Option<usize> {
        self.frequencies.windows(2).position(|w| w[1] <= w[0].saturating_mul(3))
    }

    /// True iff `k[n+1] / k[n] > 3` for every consecutive pair.
    pub fn is_lacunary(&self) -> bool {
        self.lacunarity_violation().is_none()
    }

    fn check_lacunary(&self) -> Result<()> {
        match self.lacunarity_violation() {
            None => Ok(()),
            Some(index) => Err(Error::NotLacunary {
                index,
                next: index + 1,
                ratio: self.frequencies[index + 1] as f64 / self.frequencies[index] as f64,
            }),
        }
    }

    /// Smallest power-of-two grid accepted by [`riesz_density`] and, for the
    /// given output range, by [`riesz_coeffs_quadrature`].
    pub fn min_grid_size(&self, n_out: usize) -> usize {
        let k_max = *self.frequencies.last().unwrap() as usize;
        let need = (4 * k_max).max(self.degree() as usize + n_out + 1).max(2 * n_out);
        need.next_power_of_two()
    }
}

fn check_grid(spec: &RieszSpec, grid_size: usize) -> Result<()> {
    if !grid_size.is_power_of_two() {
        return Err(invalid("grid_size", format!("{grid_size} is not a power of two")));
    }
    let k_max = *spec.frequencies.last().unwrap();
    if (grid_size as u64) < 4 * k_max {
        return Err(Error::GridTooSmall { grid: grid_size, reason: format!("need at least 4 * k_N = {}", 4 * k_max) });
    }
    // Aliasing of the constant term would break the normalization otherwise.
    if grid_size as u64 <= spec.degree() {
        return Err(Error::GridTooSmall {
            grid: grid_size,
            reason: format!("must exceed the product degree sum(k) = {}", spec.degree()),
        });
    }
    Ok(())
}

/// Samples `rho_N(x_j)`, `x_j = j / grid_size`.
pub fn riesz_density(spec: &RieszSpec, grid_size: usize) -> Result<GridDensity> {
    check_grid(spec, grid_size)?;
    let g = grid_size as u64;
    let samples = (0..g)
        .map(|j| {
            spec.amplitudes
                .iter()
                .zip(&spec.frequencies)
                .zip(&spec.phases)
                .map(|((a, k), phi)| {
                    let turn = ((k % g) * j % g) as f64 / g as f64;
                    1.0 + a * (TAU * turn + phi.rem_euclid(TAU)).cos()
                })
                .product()
        })
        .collect();
    GridDensity::new(1, grid_size, samples).map_err(|e| match e {
        Error::InvalidParameter { name: "samples", reason } => invalid(
            "frequencies",
            format!("the product is not a probability density ({reason}): some +-k_n combinations cancel to zero"),
        ),
        other => other,
    })
}

/// Coefficients by discrete Fourier transform of [`riesz_density`] samples.
///
/// The product is a trigonometric polynomial of degree `D = sum k_n`, so the
/// grid transform is exact (up to rounding) whenever `D + n_out < grid_size`.
pub fn riesz_coeffs_quadrature(spec: &RieszSpec, grid_size: usize, n_out: usize) -> Result<FourierSeq> {
    if n_out == 0 {
        return Err(invalid("n_out", "must be positive"));
    }
    let density = riesz_density(spec, grid_size)?;
    if n_out > grid_size / 2 {
        return Err(Error::RangeTooLarge { requested: n_out, available: grid_size / 2 });
    }
    if spec.degree() + n_out as u64 >= grid_size as u64 {
        return Err(Error::GridTooSmall {
            grid: grid_size,
            reason: format!("aliasing: sum(k) + n_out = {} must be below the grid size", spec.degree() + n_out as u64),
        });
    }
    let mut buf: Vec<Complex64> = density.samples().iter().map(|&s| Complex64::new(s, 0.0)).collect();
    fft::forward(&mut buf, grid_size, 1);
    let scale = 1.0 / grid_size as f64;
    FourierSeq::from_fn(n_out, |m| buf[m.rem_euclid(grid_size as i64) as usize] * scale)
}

/// Closed-form coefficients of a lacunary product.
///
/// Under `k[n+1] > 3 k[n]`, every integer has at most one expansion
/// `m = sum eps_n k_n` with `eps_n` in `{-1, 0, 1}`; then
/// `c(m) = prod_{eps_n != 0} (a_n / 2) exp(i eps_n phi_n)` and `c(m) = 0`
/// when no expansion exists.
pub fn riesz_coeffs_lacunary(spec: &RieszSpec, n_out: usize) -> Result<FourierSeq> {
    spec.check_lacunary()?;
    if n_out == 0 {
        return Err(invalid("n_out", "must be positive"));
    }
    // below[n] = k_0 + ... + k_{n-1}
    let below: Vec<i64> = spec
        .frequencies
        .iter()
        .scan(0i64, |acc, &k| {
            let prev = *acc;
            *acc += k as i64;
            Some(prev)
        })
        .collect();
    let factors: Vec<Complex64> =
        spec.amplitudes.iter().zip(&spec.phases).map(|(a, phi)| Complex64::from_polar(a / 2.0, *phi)).collect();

    let coeff = |m: i64| -> Complex64 {
        let mut rest = m;
        let mut c = Complex64::new(1.0, 0.0);
        for n in (0..spec.len()).rev() {
            // Greedy digit: forced nonzero exactly when the remainder exceeds
            // what the smaller frequencies can reach.
            if rest.abs() > below[n] {
                let k = spec.frequencies[n] as i64;
                if rest > 0 {
                    rest -= k;
                    c *= factors[n];
                } else {
                    rest += k;
                    c *= factors[n].conj();
                }
            }
        }
        if rest == 0 {
            c
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let nonneg: Vec<Complex64> = (0..=n_out as i64).map(coeff).collect();
    FourierSeq::from_nonnegative(&nonneg)
}
