//! Two-sided Fourier coefficient sequences.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::io::{fmt_f64, write_row};

/// Coefficients `c(n)` for `n` in `-N..=N`, with kernel `exp(-2 pi i n x)`.
///
/// For a real measure the sequence is hermitian, `c(-n) = conj(c(n))`; for a
/// probability measure additionally `c(0) = 1` and `|c(n)| <= 1`. These are
/// checked by [`FourierSeq::is_hermitian`] and [`FourierSeq::is_probability`]
/// rather than enforced, since sequences read from files need not satisfy
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeq {
    max_index: usize,
    coeffs: Vec<Complex64>,
}

impl FourierSeq {
    /// Builds a sequence from `2N + 1` values ordered `c(-N), ..., c(N)`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 3 || coeffs.len().is_multiple_of(2) {
            return Err(invalid("coeffs", format!("need an odd length >= 3, got {}", coeffs.len())));
        }
        Ok(Self { max_index: coeffs.len() / 2, coeffs })
    }

    /// Hermitian extension of `c(0), ..., c(N)`.
    pub fn from_nonnegative(nonneg: &[Complex64]) -> Result<Self> {
        if nonneg.len() < 2 {
            return Err(invalid("coeffs", "need c(0) and at least c(1)"));
        }
        let coeffs = nonneg[1..].iter().rev().map(|c| c.conj()).chain(nonneg.iter().copied()).collect();
        Self::new(coeffs)
    }

    pub fn from_fn(max_index: usize, mut f: impl FnMut(i64) -> Complex64) -> Result<Self> {
        let n = max_index as i64;
        Self::new((-n..=n).map(&mut f).collect())
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        let idx = n.checked_add(self.max_index as i64)?;
        usize::try_from(idx).ok().and_then(|i| self.coeffs.get(i).copied())
    }

    /// Panics when `|n| > N`.
    pub fn at(&self, n: i64) -> Complex64 {
        self.get(n).unwrap_or_else(|| panic!("index {n} outside -{0}..={0}", self.max_index))
    }

    /// All coefficients, `c(-N)` first.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c(0), ..., c(N)`.
    pub fn nonnegative(&self) -> &[Complex64] {
        &self.coeffs[self.max_index..]
    }

    /// `|c(t)|` for `t = 1..=N`, the input shape expected by the decay estimators.
    pub fn positive_magnitudes(&self) -> Vec<f64> {
        self.coeffs[self.max_index + 1..].iter().map(|c| c.norm()).collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..=self.max_index as i64).all(|n| (self.at(-n) - self.at(n).conj()).norm() <= tol)
    }

    pub fn is_probability(&self, tol: f64) -> bool {
        let c0 = self.at(0);
        (c0 - Complex64::new(1.0, 0.0)).norm() <= tol && self.coeffs.iter().all(|c| c.norm() <= 1.0 + tol)
    }

    /// Largest `|c(n) - other(n)|` over the common index range.
    pub fn max_abs_diff(&self, other: &FourierSeq) -> f64 {
        let n = self.max_index.min(other.max_index) as i64;
        (-n..=n).map(|k| (self.at(k) - other.at(k)).norm()).fold(0.0, f64::max)
    }

    /// CSV with columns `n,re,im,abs`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write_row(w, &["n", "re", "im", "abs"].map(String::from))?;
        let n = self.max_index as i64;
        for (k, c) in (-n..=n).zip(&self.coeffs) {
            write_row(w, &[k.to_string(), fmt_f64(c.re), fmt_f64(c.im), fmt_f64(c.norm())])?;
        }
        Ok(())
    }
}
