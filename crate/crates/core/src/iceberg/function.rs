use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rotations::RotationFamily;
use super::tower::Tower;
use crate::error::{invalid, Error, Result};
use crate::exact_sum::ExactSum;
use crate::io::{ravel, unravel, write_lattice_complex};

/// Tolerance on `|sum f| / h^d` for a function to count as mean-zero.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// A function on `M_{n0} = (Z / h_{n0} Z)^d`, row-major, viewed as a
/// cylindric function of the `n0`-th coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CylindricFunction {
    level: usize,
    values: Vec<Complex64>,
    mean_zero: bool,
}

impl CylindricFunction {
    pub fn new(tower: &Tower, level: usize, values: Vec<Complex64>) -> Result<Self> {
        tower.check_level(level)?;
        let expected = tower.points(level);
        if values.len() != expected {
            return Err(Error::ShapeMismatch { expected, actual: values.len() });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("values", "non-finite value"));
        }
        let mean = mean_abs(&values);
        Ok(Self { level, values, mean_zero: mean <= MEAN_ZERO_TOL })
    }

    pub fn from_real(tower: &Tower, level: usize, values: &[f64]) -> Result<Self> {
        Self::new(tower, level, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// A balanced `+-1` function: exactly half the points carry `+1`, placed
    /// by a seeded shuffle. Requires an even number of points.
    pub fn random_sign(tower: &Tower, level: usize, seed: u64) -> Result<Self> {
        tower.check_level(level)?;
        let points = tower.points(level);
        if !points.is_multiple_of(2) {
            return Err(invalid("function", format!("balanced +-1 needs an even number of points, got {points}")));
        }
        let mut values: Vec<f64> = (0..points).map(|i| if i < points / 2 { 1.0 } else { -1.0 }).collect();
        values.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::from_real(tower, level, &values)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    /// `|mean f|`.
    pub fn mean_abs(&self) -> f64 {
        mean_abs(&self.values)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let values: Vec<Complex64> = self.values.iter().map(|v| v * c).collect();
        let mean_zero = mean_abs(&values) <= MEAN_ZERO_TOL;
        Self { level: self.level, values, mean_zero }
    }
}

fn mean_abs(values: &[Complex64]) -> f64 {
    let re: ExactSum = values.iter().map(|v| v.re).collect();
    let im: ExactSum = values.iter().map(|v| v.im).collect();
    Complex64::new(re.value(), im.value()).norm() / values.len() as f64
}

/// How an experiment specifies its observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Balanced `+-1` values from a seeded shuffle.
    RandomSign {
        #[serde(default = "first_level")]
        level: usize,
        seed: u64,
    },
    /// Explicit real parts, optional imaginary parts, row-major.
    Values {
        #[serde(default = "first_level")]
        level: usize,
        values: Vec<f64>,
        #[serde(default)]
        imag: Option<Vec<f64>>,
    },
}

fn first_level() -> usize {
    1
}

impl FunctionSpec {
    pub fn level(&self) -> usize {
        match self {
            FunctionSpec::RandomSign { level, .. } | FunctionSpec::Values { level, .. } => *level,
        }
    }

    pub fn build(&self, tower: &Tower) -> Result<CylindricFunction> {
        match self {
            FunctionSpec::RandomSign { level, seed } => CylindricFunction::random_sign(tower, *level, *seed),
            FunctionSpec::Values { level, values, imag } => {
                let im = match imag {
                    Some(im) if im.len() != values.len() => {
                        return Err(Error::ShapeMismatch { expected: values.len(), actual: im.len() })
                    }
                    Some(im) => im.clone(),
                    None => vec![0.0; values.len()],
                };
                CylindricFunction::new(
                    tower,
                    *level,
                    values.iter().zip(im).map(|(&r, i)| Complex64::new(r, i)).collect(),
                )
            }
        }
    }
}

/// `phi_n(x) = (u + alpha_{n,gamma}) mod h_n` for `x = gamma + u`,
/// `u` in `[0, h_n)^d`, as a row-major index into `M_n`.
pub fn descend(tower: &Tower, rotations: &RotationFamily, level: usize, x: &[u64]) -> Vec<u64> {
    let h = tower.height(level);
    let q = tower.factor(level) as usize;
    let block: Vec<usize> = x.iter().map(|c| (c / h) as usize).collect();
    let alpha = rotations.alpha(level, ravel(&block, q));
    x.iter().zip(alpha).map(|(c, a)| (c % h + a) % h).collect()
}

/// `f_m = f_{n0} o phi_{n0} o ... o phi_{m-1}` on `M_m`.
pub fn lift(f: &CylindricFunction, tower: &Tower, rotations: &RotationFamily, target: usize) -> Result<Vec<Complex64>> {
    Ok(lift_levels(f, tower, rotations, target)?.pop().unwrap())
}

/// The lifts to every level `n0, n0 + 1, ..., target`.
pub fn lift_levels(
    f: &CylindricFunction,
    tower: &Tower,
    rotations: &RotationFamily,
    target: usize,
) -> Result<Vec<Vec<Complex64>>> {
    tower.check_supported_dimension()?;
    tower.check_level(target)?;
    if target < f.level {
        return Err(Error::LevelOutOfRange { level: target, lo: f.level, hi: tower.levels() });
    }
    if rotations.values().len() + 1 != tower.levels() {
        return Err(Error::Mismatch("rotation family was built for a different tower".into()));
    }
    let mut levels = vec![f.values.clone()];
    for n in f.level..target {
        let prev = levels.last().unwrap();
        levels.push(lift_once(prev, tower, rotations, n));
    }
    Ok(levels)
}

fn lift_once(prev: &[Complex64], tower: &Tower, rotations: &RotationFamily, level: usize) -> Vec<Complex64> {
    let h = tower.height(level) as usize;
    let dim = tower.dimension();
    if dim == 1 {
        let alphas: Vec<usize> = (0..tower.coset_count(level)).map(|c| rotations.alpha(level, c)[0] as usize).collect();
        return alphas.iter().flat_map(|&a| (0..h).map(move |u| prev[(u + a) % h])).collect();
    }
    let side = tower.height(level + 1) as usize;
    (0..tower.points(level + 1))
        .map(|idx| {
            let x: Vec<u64> = unravel(idx, side, dim).into_iter().map(|c| c as u64).collect();
            let y: Vec<usize> = descend(tower, rotations, level, &x).into_iter().map(|c| c as usize).collect();
            prev[ravel(&y, h)]
        })
        .collect()
}

/// `(x + t) mod h` componentwise: the action of `t` on `M_m`.
pub fn shift_at_level(x: &[u64], t: &[i64], height: u64) -> Vec<u64> {
    let h = height as i128;
    x.iter().zip(t).map(|(&c, &s)| ((c as i128 + s as i128).rem_euclid(h)) as u64).collect()
}

/// CSV with columns `x,re,im,abs` (or `x1,x2,...`).
pub fn write_lifted_csv<W: std::io::Write>(
    w: &mut W,
    tower: &Tower,
    level: usize,
    values: &[Complex64],
) -> std::io::Result<()> {
    write_lattice_complex(w, "x", tower.height(level) as usize, tower.dimension(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iceberg::{build_tower, morse_rotations, sample_rotations, TowerSpec};

    fn real(v: &[Complex64]) -> Vec<f64> {
        v.iter().map(|c| c.re).collect()
    }

    #[test]
    fn morse_block_by_hand() {
        let tower = build_tower(&TowerSpec::new(1, 2, vec![2, 2])).unwrap();
        let rot = morse_rotations(&tower).unwrap();
        let f = CylindricFunction::from_real(&tower, 1, &[1.0, -1.0]).unwrap();
        assert_eq!(real(&lift(&f, &tower, &rot, 2).unwrap()), vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(real(&lift(&f, &tower, &rot, 3).unwrap()), vec![1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0]);
        assert_eq!(real(&lift(&f, &tower, &rot, 1).unwrap()), vec![1.0, -1.0]);
    }

    #[test]
    fn constants_lift_to_constants() {
        let tower = build_tower(&TowerSpec::new(2, 3, vec![2, 3])).unwrap();
        let rot = sample_rotations(&tower, 5);
        let c = Complex64::new(0.3, -1.5);
        let f = CylindricFunction::new(&tower, 1, vec![c; 9]).unwrap();
        assert!(!f.is_mean_zero());
        let lifted = lift(&f, &tower, &rot, 3).unwrap();
        assert_eq!(lifted.len(), 18 * 18);
        assert!(lifted.iter().all(|v| *v == c));
    }

    #[test]
    fn lift_level_errors() {
        let tower = build_tower(&TowerSpec::new(1, 2, vec![2, 2])).unwrap();
        let rot = morse_rotations(&tower).unwrap();
        let f = CylindricFunction::from_real(&tower, 2, &[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert!(matches!(lift(&f, &tower, &rot, 1), Err(Error::LevelOutOfRange { .. })));
        assert!(lift(&f, &tower, &rot, 4).is_err());
        let t3 = build_tower(&TowerSpec::new(3, 2, vec![2])).unwrap();
        let f3 = CylindricFunction::from_real(&t3, 1, &[1.0; 8]).unwrap();
        assert!(matches!(lift(&f3, &t3, &sample_rotations(&t3, 1), 2), Err(Error::UnsupportedDimension(3))));
    }

    #[test]
    fn random_sign_is_balanced() {
        let tower = build_tower(&TowerSpec::new(1, 4, vec![4])).unwrap();
        let f = CylindricFunction::random_sign(&tower, 1, 11).unwrap();
        assert!(f.is_mean_zero());
        assert_eq!(f.values().iter().filter(|v| v.re == 1.0).count(), 2);
        assert_eq!(f, CylindricFunction::random_sign(&tower, 1, 11).unwrap());
        let odd = build_tower(&TowerSpec::new(1, 3, vec![2])).unwrap();
        assert!(CylindricFunction::random_sign(&odd, 1, 0).is_err());
    }

    #[test]
    fn shifts() {
        assert_eq!(shift_at_level(&[3], &[5], 8), vec![0]);
        assert_eq!(shift_at_level(&[3, 7], &[0, 0], 8), vec![3, 7]);
        let x = shift_at_level(&[6, 1], &[13, -9], 8);
        assert_eq!(shift_at_level(&x, &[-13, 9], 8), vec![6, 1]);
    }

    #[test]
    fn spec_json() {
        let s: FunctionSpec = serde_json::from_str(r#"{"kind":"random_sign","seed":3}"#).unwrap();
        assert_eq!(s, FunctionSpec::RandomSign { level: 1, seed: 3 });
        let v: FunctionSpec = serde_json::from_str(r#"{"kind":"values","level":1,"values":[1,-1]}"#).unwrap();
        let tower = build_tower(&TowerSpec::new(1, 2, vec![2])).unwrap();
        assert!(v.build(&tower).unwrap().is_mean_zero());
    }
}
