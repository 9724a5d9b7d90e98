use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact_sum::ExactSum;
use crate::fourier::FourierSeq;
use crate::io::{fmt_f64, write_row};

/// `(1 / (2N + 1)) sum_{|n| <= N} |c(n)|^2`.
pub fn wiener_average(seq: &FourierSeq, n: usize) -> Result<f64> {
    if n > seq.max_index() {
        return Err(Error::RangeTooLarge { requested: n, available: seq.max_index() });
    }
    let sum: ExactSum = (-(n as i64)..=n as i64).map(|k| seq.at(k).norm_sqr()).collect();
    Ok(sum.value() / (2 * n + 1) as f64)
}

/// Partial sums `S_p(T') = sum_{1 <= t <= T'} |c_t|^p` at `T' = 1, 2, 4, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProfile {
    pub p: f64,
    /// `(T', S_p(T'))` for every power of two `T' <= T`.
    pub points: Vec<(usize, f64)>,
}

impl LpProfile {
    /// `S_p(2T') - S_p(T')` for consecutive points.
    pub fn increments(&self) -> Vec<(usize, f64)> {
        self.points.windows(2).map(|w| (w[1].0, w[1].1 - w[0].1)).collect()
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write_row(w, &["t", "partial_sum"].map(String::from))?;
        for (t, s) in &self.points {
            write_row(w, &[t.to_string(), fmt_f64(*s)])?;
        }
        Ok(())
    }
}

/// The profile of `mags[t - 1] = |c_t|` up to `t_max`. Sums are exact before
/// a single rounding, so the profile is monotone.
pub fn lp_norm_profile(mags: &[f64], p: f64, t_max: usize) -> Result<LpProfile> {
    if !p.is_finite() || p < 1.0 {
        return Err(invalid("p", format!("need a finite p >= 1, got {p}")));
    }
    if t_max > mags.len() {
        return Err(Error::RangeTooLarge { requested: t_max, available: mags.len() });
    }
    let mut acc = ExactSum::new();
    let mut points = Vec::new();
    for (i, m) in mags[..t_max].iter().enumerate() {
        acc.add(m.abs().powf(p));
        let t = i + 1;
        if t.is_power_of_two() {
            points.push((t, acc.value()));
        }
    }
    Ok(LpProfile { p, points })
}

/// `sum_{lo < t <= hi} |c_t|^p`.
pub fn lp_increment(mags: &[f64], p: f64, lo: usize, hi: usize) -> Result<f64> {
    if hi > mags.len() {
        return Err(Error::RangeTooLarge { requested: hi, available: mags.len() });
    }
    if hi <= lo {
        return Err(Error::RangeEmpty(format!("{lo} < t <= {hi}")));
    }
    Ok(mags[lo..hi].iter().map(|m| m.abs().powf(p)).collect::<ExactSum>().value())
}

/// Compares the `p = 2` and `p = 4` increments over an early and a late range
/// of lags. A square-summable-only-above-2 envelope keeps the `p = 2`
/// increment from shrinking while the `p = 4` increment collapses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpPattern {
    pub first: (usize, usize),
    pub last: (usize, usize),
    pub p2_first: f64,
    pub p2_last: f64,
    pub p4_first: f64,
    pub p4_last: f64,
    /// `p2_last / p2_first`; passes when `>= p2_min_ratio`.
    pub p2_ratio: f64,
    /// `p4_last / p4_first`; passes when `<= p4_max_ratio`.
    pub p4_ratio: f64,
    pub p2_min_ratio: f64,
    pub p4_max_ratio: f64,
    pub pass: bool,
}

pub const LP_P2_MIN_RATIO: f64 = 0.5;
pub const LP_P4_MAX_RATIO: f64 = 0.5;

pub fn lp_pattern(mags: &[f64], first: (usize, usize), last: (usize, usize)) -> Result<LpPattern> {
    let p2_first = lp_increment(mags, 2.0, first.0, first.1)?;
    let p2_last = lp_increment(mags, 2.0, last.0, last.1)?;
    let p4_first = lp_increment(mags, 4.0, first.0, first.1)?;
    let p4_last = lp_increment(mags, 4.0, last.0, last.1)?;
    if p2_first == 0.0 || p4_first == 0.0 {
        return Err(invalid("sequence", "zero increment over the first range"));
    }
    let p2_ratio = p2_last / p2_first;
    let p4_ratio = p4_last / p4_first;
    Ok(LpPattern {
        first,
        last,
        p2_first,
        p2_last,
        p4_first,
        p4_last,
        p2_ratio,
        p4_ratio,
        p2_min_ratio: LP_P2_MIN_RATIO,
        p4_max_ratio: LP_P4_MAX_RATIO,
        pass: p2_ratio >= LP_P2_MIN_RATIO && p4_ratio <= LP_P4_MAX_RATIO,
    })
}

/// Relative slack in the cumulative-mass comparison, absorbing rounding in
/// sums such as ten copies of `0.1`.
const CUMULATIVE_TOL: f64 = 1e-12;

/// The smallest fraction of cells carrying mass `>= 1 - eps`, taking the
/// heaviest cells first.
pub fn mass_concentration(masses: &[f64], eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("must lie in (0, 1), got {eps}")));
    }
    if masses.is_empty() {
        return Err(Error::Empty("masses"));
    }
    if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(invalid("masses", "must be finite and nonnegative"));
    }
    let total: f64 = masses.iter().copied().collect::<ExactSum>().value();
    if total <= 0.0 {
        return Err(invalid("masses", "total mass is zero"));
    }
    let mut sorted = masses.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let target = (1.0 - eps) * total * (1.0 - CUMULATIVE_TOL);
    let mut acc = ExactSum::new();
    for (i, m) in sorted.iter().enumerate() {
        acc.add(*m);
        if acc.value() >= target {
            return Ok((i + 1) as f64 / masses.len() as f64);
        }
    }
    Ok(1.0)
}
