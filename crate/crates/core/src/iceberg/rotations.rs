use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tower::Tower;
use crate::error::{Error, Result};

/// Where the rotation vectors `alpha_{n,gamma}` are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaSupport {
    /// Uniform over all `h_n^d` points of `M_n`.
    #[default]
    Full,
    /// Uniform over the `q_n^d` points `floor(j h_n / q_n)`, `j` in `[0, q_n)^d`.
    Coset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Random {
        seed: u64,
        #[serde(default)]
        support: AlphaSupport,
    },
    Morse,
    Explicit,
}

/// The rotation vectors of the maps `phi_n(gamma + u) = u + alpha_{n,gamma}`.
///
/// `values()[n - 1][c]` is `alpha_{n,gamma}` for the coset with row-major
/// index `c` (see [`Tower::cosets`]); every component lies in `[0, h_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationFamily {
    provenance: Provenance,
    values: Vec<Vec<Vec<u64>>>,
}

impl RotationFamily {
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn values(&self) -> &[Vec<Vec<u64>>] {
        &self.values
    }

    /// `alpha_{n,gamma}` for `n` in `1..L` and coset index `c`.
    pub fn alpha(&self, level: usize, coset: usize) -> &[u64] {
        &self.values[level - 1][coset]
    }

    /// Rotations given value by value; shapes and ranges are validated.
    pub fn explicit(tower: &Tower, values: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        let family = Self { provenance: Provenance::Explicit, values };
        family.validate(tower)?;
        Ok(family)
    }

    /// Checks the family against `tower`: one entry per level below the top,
    /// `q_n^d` vectors of length `d` per level, components in `[0, h_n)`.
    /// Random and Morse families must also match their regenerated values.
    pub fn validate(&self, tower: &Tower) -> Result<()> {
        let levels = tower.levels() - 1;
        if self.values.len() != levels {
            return Err(Error::ShapeMismatch { expected: levels, actual: self.values.len() });
        }
        for (i, level) in self.values.iter().enumerate() {
            let n = i + 1;
            if level.len() != tower.coset_count(n) {
                return Err(Error::ShapeMismatch { expected: tower.coset_count(n), actual: level.len() });
            }
            let h = tower.height(n);
            for (c, alpha) in level.iter().enumerate() {
                if alpha.len() != tower.dimension() {
                    return Err(Error::ShapeMismatch { expected: tower.dimension(), actual: alpha.len() });
                }
                if let Some(&value) = alpha.iter().find(|&&a| a >= h) {
                    return Err(Error::RotationOutOfRange { level: n, coset: c, value, modulus: h });
                }
            }
        }
        let regenerated = match self.provenance {
            Provenance::Explicit => return Ok(()),
            Provenance::Morse => morse_rotations(tower)?,
            Provenance::Random { seed, support } => sample_rotations_with(tower, seed, support),
        };
        if regenerated.values != self.values {
            return Err(Error::Mismatch("rotation values do not match their recorded provenance".into()));
        }
        Ok(())
    }
}

/// Independent uniform rotations over all of `M_n`; see [`sample_rotations_with`].
pub fn sample_rotations(tower: &Tower, seed: u64) -> RotationFamily {
    sample_rotations_with(tower, seed, AlphaSupport::Full)
}

/// Draws every `alpha_{n,gamma}` from its own ChaCha8 stream keyed by
/// `(seed, n, coset index)`, so the family is reproducible and slots are
/// independent of drawing order.
pub fn sample_rotations_with(tower: &Tower, seed: u64, support: AlphaSupport) -> RotationFamily {
    let values = (1..tower.levels())
        .map(|n| {
            let h = tower.height(n);
            let q = tower.factor(n);
            (0..tower.coset_count(n))
                .map(|c| {
                    let mut rng = slot_rng(seed, n as u64, c as u64);
                    (0..tower.dimension())
                        .map(|_| match support {
                            AlphaSupport::Full => rng.random_range(0..h),
                            AlphaSupport::Coset => rng.random_range(0..q) * h / q,
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    RotationFamily { provenance: Provenance::Random { seed, support }, values }
}

fn slot_rng(seed: u64, level: u64, coset: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&level.to_le_bytes());
    key[16..24].copy_from_slice(&coset.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// The Morse family `(alpha_{n,0}, alpha_{n,1}) = (0, h_n / 2)`.
pub fn morse_rotations(tower: &Tower) -> Result<RotationFamily> {
    if tower.dimension() != 1 {
        return Err(Error::MorsePrecondition(format!("dimension 1, got {}", tower.dimension())));
    }
    for n in 1..tower.levels() {
        if tower.factor(n) != 2 {
            return Err(Error::MorsePrecondition(format!("q_{n} = 2, got {}", tower.factor(n))));
        }
    }
    if let Some(h) = tower.heights().iter().find(|h| *h % 2 != 0) {
        return Err(Error::MorsePrecondition(format!("even heights, got {h}")));
    }
    let values = (1..tower.levels()).map(|n| vec![vec![0], vec![tower.height(n) / 2]]).collect();
    Ok(RotationFamily { provenance: Provenance::Morse, values })
}
