use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::unit_phase;
use crate::error::{invalid, Error, Result};
use crate::fourier::FourierSeq;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// A finite sum of point masses on `[0, 1)` with total mass one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAtomic")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtomic {
    atoms: Vec<Atom>,
}

impl TryFrom<RawAtomic> for AtomicMeasure {
    type Error = Error;
    fn try_from(raw: RawAtomic) -> Result<Self> {
        AtomicMeasure::new(raw.atoms)
    }
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty("atomic measure needs at least one atom"));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !(0.0..1.0).contains(&a.location) {
                return Err(invalid("atoms", format!("location {} of atom {i} is outside [0, 1)", a.location)));
            }
            if !a.mass.is_finite() || a.mass <= 0.0 {
                return Err(invalid("atoms", format!("mass {} of atom {i} is not positive", a.mass)));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("atoms", format!("masses sum to {total}, not 1")));
        }
        let mut locs: Vec<f64> = atoms.iter().map(|a| a.location).collect();
        locs.sort_by(f64::total_cmp);
        if locs.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("atoms", "locations must be pairwise distinct"));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn max_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).fold(0.0, f64::max)
    }

    /// `sum mass^2`, the limit of the Wiener average.
    pub fn sum_squared_masses(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass * a.mass).sum()
    }
}

/// `c(n) = sum_j mass_j exp(-2 pi i n loc_j)`.
pub fn atomic_coeffs(measure: &AtomicMeasure, n_out: usize) -> Result<FourierSeq> {
    if n_out == 0 {
        return Err(invalid("n_out", "must be positive"));
    }
    let nonneg: Vec<Complex64> = (0..=n_out as u64)
        .map(|n| {
            measure
                .atoms
                .iter()
                .map(|a| {
                    // n * loc modulo 1, keeping precision for large n
                    let turn = (n as f64 * a.location).rem_euclid(1.0);
                    unit_phase(turn) * a.mass
                })
                .sum()
        })
        .collect();
    FourierSeq::from_nonnegative(&nonneg)
}
