use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Parameters of a lattice tower `Gamma_n = h_n Z^d`, `h_{n+1} = q_n h_n`,
/// with fundamental domains `U_n = [0, h_n)^d`. Levels are numbered from 1.
///
/// In JSON either `base` + `factors` or the full `heights` list may be given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTower")]
pub struct TowerSpec {
    pub dimension: usize,
    pub base: u64,
    pub factors: Vec<u64>,
    /// When set, `q_{n+1} > 2 q_n` is enforced.
    #[serde(default)]
    pub strict: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTower {
    #[serde(default = "one")]
    dimension: usize,
    base: Option<u64>,
    factors: Option<Vec<u64>>,
    heights: Option<Vec<u64>>,
    #[serde(default)]
    strict: bool,
}

fn one() -> usize {
    1
}

impl TryFrom<RawTower> for TowerSpec {
    type Error = Error;
    fn try_from(raw: RawTower) -> Result<Self> {
        match (raw.base, raw.factors, raw.heights) {
            (Some(base), factors, None) => Ok(TowerSpec {
                dimension: raw.dimension,
                base,
                factors: factors.unwrap_or_default(),
                strict: raw.strict,
            }),
            (None, None, Some(heights)) => {
                let mut spec = TowerSpec::from_heights(raw.dimension, &heights)?;
                spec.strict = raw.strict;
                Ok(spec)
            }
            _ => Err(invalid("tower", "give either `base` (+ `factors`) or `heights`")),
        }
    }
}

impl TowerSpec {
    pub fn new(dimension: usize, base: u64, factors: Vec<u64>) -> Self {
        Self { dimension, base, factors, strict: false }
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    /// Recovers `base` and `factors` from `h_1, ..., h_L`.
    pub fn from_heights(dimension: usize, heights: &[u64]) -> Result<Self> {
        let (&base, rest) = heights.split_first().ok_or(Error::Empty("tower heights"))?;
        let mut factors = Vec::with_capacity(rest.len());
        let mut prev = base;
        for (i, &h) in rest.iter().enumerate() {
            if prev == 0 || h % prev != 0 {
                return Err(invalid("heights", format!("h[{}] = {h} is not a multiple of h[{i}] = {prev}", i + 1)));
            }
            factors.push(h / prev);
            prev = h;
        }
        Ok(Self::new(dimension, base, factors))
    }

    pub fn levels(&self) -> usize {
        self.factors.len() + 1
    }
}

/// A validated tower with materialized heights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    spec: TowerSpec,
    heights: Vec<u64>,
}

/// Materializes `h_1, ..., h_L`, checking factors, strictness and that
/// `h_L^d` fits the platform's index range.
pub fn build_tower(spec: &TowerSpec) -> Result<Tower> {
    if spec.dimension == 0 {
        return Err(invalid("dimension", "must be positive"));
    }
    if spec.base == 0 {
        return Err(invalid("base", "h_1 must be positive"));
    }
    if let Some((i, q)) = spec.factors.iter().enumerate().find(|(_, q)| **q < 2) {
        return Err(invalid("factors", format!("q[{}] = {q} must be >= 2", i + 1)));
    }
    if spec.strict {
        if let Some(i) = spec.factors.windows(2).position(|w| w[1] <= 2 * w[0]) {
            return Err(Error::StrictnessViolated {
                index: i + 1,
                next: i + 2,
                q: spec.factors[i],
                q_next: spec.factors[i + 1],
            });
        }
    }
    let mut heights = vec![spec.base];
    for (i, q) in spec.factors.iter().enumerate() {
        let h = heights[i]
            .checked_mul(*q)
            .ok_or_else(|| Error::Overflow(format!("h_{} = {} * {q} exceeds u64", i + 2, heights[i])))?;
        heights.push(h);
    }
    let top = *heights.last().unwrap();
    let points = usize::try_from(top)
        .ok()
        .and_then(|h| h.checked_pow(spec.dimension as u32))
        .ok_or_else(|| Error::Overflow(format!("h_L^d = {top}^{} exceeds usize", spec.dimension)))?;
    // Exact f64 arithmetic on lattice sizes is relied on by the normalizations.
    if points as u64 > 1 << 53 {
        return Err(Error::Overflow(format!("h_L^d = {points} exceeds 2^53")));
    }
    Ok(Tower { spec: spec.clone(), heights })
}

impl Tower {
    pub fn spec(&self) -> &TowerSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension
    }

    /// Number of levels `L`.
    pub fn levels(&self) -> usize {
        self.heights.len()
    }

    pub fn heights(&self) -> &[u64] {
        &self.heights
    }

    /// `h_n` for `n` in `1..=L`.
    pub fn height(&self, level: usize) -> u64 {
        self.heights[level - 1]
    }

    /// `q_n = h_{n+1} / h_n` for `n` in `1..L`.
    pub fn factor(&self, level: usize) -> u64 {
        self.spec.factors[level - 1]
    }

    /// `|M_n| = h_n^d`.
    pub fn points(&self, level: usize) -> usize {
        (self.height(level) as usize).pow(self.dimension() as u32)
    }

    /// `|Gamma_n / Gamma_{n+1}| = q_n^d`.
    pub fn coset_count(&self, level: usize) -> usize {
        (self.factor(level) as usize).pow(self.dimension() as u32)
    }

    /// Representatives of `Gamma_n / Gamma_{n+1}`: `{0, h_n, ..., (q_n - 1) h_n}^d`
    /// in row-major order.
    pub fn cosets(&self, level: usize) -> Vec<Vec<u64>> {
        let q = self.factor(level) as usize;
        let h = self.height(level);
        (0..self.coset_count(level))
            .map(|idx| crate::io::unravel(idx, q, self.dimension()).into_iter().map(|j| j as u64 * h).collect())
            .collect()
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<()> {
        if level == 0 || level > self.levels() {
            return Err(Error::LevelOutOfRange { level, lo: 1, hi: self.levels() });
        }
        Ok(())
    }

    pub(crate) fn check_supported_dimension(&self) -> Result<()> {
        match self.dimension() {
            1 | 2 => Ok(()),
            d => Err(Error::UnsupportedDimension(d)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heights_multiply() {
        let t = build_tower(&TowerSpec::new(1, 2, vec![2, 2, 2])).unwrap();
        assert_eq!(t.heights(), &[2, 4, 8, 16]);
        assert_eq!(t.levels(), 4);
    }

    #[test]
    fn strictness_boundary() {
        let spec = TowerSpec::new(1, 3, vec![3, 6, 13]).strict();
        assert!(matches!(build_tower(&spec), Err(Error::StrictnessViolated { index: 1, next: 2, q: 3, q_next: 6 })));
        assert!(build_tower(&TowerSpec::new(1, 3, vec![3, 7, 15]).strict()).is_ok());
        assert!(build_tower(&TowerSpec::new(1, 3, vec![3, 6, 13])).is_ok());
    }

    #[test]
    fn two_dimensional_cosets() {
        let t = build_tower(&TowerSpec::new(2, 2, vec![2])).unwrap();
        assert_eq!(t.cosets(1), vec![vec![0, 0], vec![0, 2], vec![2, 0], vec![2, 2]]);
        assert_eq!(t.coset_count(1), 4);
    }

    #[test]
    fn overflow_and_bad_factors() {
        assert!(matches!(build_tower(&TowerSpec::new(1, 1 << 40, vec![1 << 30])), Err(Error::Overflow(_))));
        assert!(matches!(build_tower(&TowerSpec::new(3, 1 << 20, vec![2])), Err(Error::Overflow(_))));
        assert!(build_tower(&TowerSpec::new(1, 4, vec![1])).is_err());
        assert!(build_tower(&TowerSpec::new(0, 4, vec![2])).is_err());
    }

    #[test]
    fn json_forms() {
        let a: TowerSpec = serde_json::from_str(r#"{"heights":[4,16,96,960]}"#).unwrap();
        assert_eq!(a, TowerSpec::new(1, 4, vec![4, 6, 10]));
        let b: TowerSpec = serde_json::from_str(r#"{"dimension":2,"base":2,"factors":[2]}"#).unwrap();
        assert_eq!(b.dimension, 2);
        assert!(serde_json::from_str::<TowerSpec>(r#"{"heights":[4,10]}"#).is_err());
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<TowerSpec>(&text).unwrap(), a);
    }
}
