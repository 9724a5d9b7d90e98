use serde::{Deserialize, Serialize};

use super::stats::{eligible_lags, EnsembleStats, Source};
use crate::analysis::{block_maxima, fit_blocks, Block, Weighting};
use crate::error::{Error, Result};
use crate::iceberg::{lag_envelope, Tower};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Both sides of the test are identically zero.
    VacuousPass,
}

impl Verdict {
    pub fn passed(self) -> bool {
        !matches!(self, Verdict::Fail)
    }

    fn from_bool(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

fn check_tower(stats: &EnsembleStats, tower: &Tower) -> Result<()> {
    if &stats.tower != tower.spec() {
        return Err(Error::Mismatch("statistics were computed on a different tower".into()));
    }
    tower.check_level(stats.level)
}

pub const Z_THRESHOLD: f64 = 3.0;
pub const REQUIRED_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanZeroReport {
    pub level: usize,
    pub lags_tested: usize,
    pub lags_within: usize,
    pub fraction_within: f64,
    /// Largest z-score; `None` when it is infinite (zero spread, nonzero mean).
    pub max_z: Option<f64>,
    pub z_threshold: f64,
    pub required_fraction: f64,
    pub verdict: Verdict,
}

/// `z = |mean| / (stddev / sqrt(R))` at each lag `h_{n-1} s`, `s != 0`;
/// passes when at least 95% of lags have `z <= 3`.
pub fn test_mean_zero(stats: &EnsembleStats, tower: &Tower) -> Result<MeanZeroReport> {
    check_tower(stats, tower)?;
    let lags = eligible_lags(tower, stats.level);
    if lags.is_empty() {
        return Err(Error::NoEligibleLags(format!("level {} has no coarser lattice", stats.level)));
    }
    let sqrt_r = (stats.replica_count as f64).sqrt();
    let z: Vec<f64> = lags
        .iter()
        .map(|&i| {
            let m = stats.mean[i].norm();
            let sd = stats.variance[i].sqrt();
            match (sd > 0.0, m > 0.0) {
                (true, _) => m / (sd / sqrt_r),
                (false, false) => 0.0,
                (false, true) => f64::INFINITY,
            }
        })
        .collect();
    let within = z.iter().filter(|&&v| v <= Z_THRESHOLD).count();
    let fraction = within as f64 / lags.len() as f64;
    let max_z = z.iter().copied().fold(0.0, f64::max);
    Ok(MeanZeroReport {
        level: stats.level,
        lags_tested: lags.len(),
        lags_within: within,
        fraction_within: fraction,
        max_z: max_z.is_finite().then_some(max_z),
        z_threshold: Z_THRESHOLD,
        required_fraction: REQUIRED_FRACTION,
        verdict: Verdict::from_bool(fraction >= REQUIRED_FRACTION),
    })
}

pub const RECURSION_BAND: (f64, f64) = (0.2, 5.0);
/// Coefficient of variation of the per-replica lag means above which the
/// recursion report warns that the replica count is too small.
pub const MAX_REPLICA_CV: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionReport {
    pub level: usize,
    pub q: u64,
    /// Mean of `E |R_n(t)|^2` over `t` in `Gamma_{n-1}`, `t != 0`.
    pub numerator: f64,
    /// Mean of `E |R_{n-1}(t)|^2` over all of `M_{n-1}`.
    pub denominator: f64,
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    /// Coefficient of variation of the per-replica numerator terms.
    pub replica_cv: Option<f64>,
    pub warnings: Vec<String>,
    pub verdict: Verdict,
}

/// Ratio of level-`n` second moments on the coarse lattice to the
/// lag-averaged level-`(n-1)` second moment; passes when it lies in
/// `[0.2 / q_{n-1}, 5 / q_{n-1}]`.
pub fn test_recursion(stats_n: &EnsembleStats, stats_prev: &EnsembleStats, tower: &Tower) -> Result<RecursionReport> {
    check_tower(stats_n, tower)?;
    check_tower(stats_prev, tower)?;
    if stats_prev.level + 1 != stats_n.level {
        return Err(Error::Mismatch(format!("levels {} and {} are not consecutive", stats_prev.level, stats_n.level)));
    }
    let mut warnings = Vec::new();
    if stats_n.replica_count != stats_prev.replica_count {
        warnings.push(format!("replica counts differ: {} vs {}", stats_n.replica_count, stats_prev.replica_count));
    }
    let lags = eligible_lags(tower, stats_n.level);
    let numerator = lags.iter().map(|&i| stats_n.second_moment[i]).sum::<f64>() / lags.len() as f64;
    let denominator = stats_prev.l2_mean();
    let q = tower.factor(stats_prev.level);
    let (lower, upper) = (RECURSION_BAND.0 / q as f64, RECURSION_BAND.1 / q as f64);
    let replica_cv = coefficient_of_variation(&stats_n.replica_eligible_means);
    if let Some(cv) = replica_cv.filter(|&cv| cv > MAX_REPLICA_CV) {
        warnings.push(format!("insufficient replicas: stddev/mean = {cv:.3} > {MAX_REPLICA_CV}"));
    }
    let (ratio, verdict) = if numerator == 0.0 && denominator == 0.0 {
        (f64::NAN, Verdict::VacuousPass)
    } else {
        let ratio = numerator / denominator;
        (ratio, Verdict::from_bool(ratio >= lower && ratio <= upper))
    };
    Ok(RecursionReport {
        level: stats_n.level,
        q,
        numerator,
        denominator,
        ratio,
        lower,
        upper,
        replica_cv,
        warnings,
        verdict,
    })
}

/// Sample standard deviation over mean; `None` when undefined.
pub fn coefficient_of_variation(samples: &[f64]) -> Option<f64> {
    if samples.len() < 2 {
        return None;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return None;
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some(var.sqrt() / mean.abs())
}

/// Lower end of the lag range examined by [`test_moment_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagRangeStart {
    /// `h_1 < t <= h_n / 2`: spans every level below `n`.
    #[default]
    FirstLevel,
    /// `h_{n-1} < t <= h_n / 2`: the top level only.
    PreviousLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentBoundOptions {
    pub range_start: LagRangeStart,
    pub max_slope: f64,
    pub max_constant_ratio: f64,
}

impl Default for MomentBoundOptions {
    fn default() -> Self {
        Self { range_start: LagRangeStart::FirstLevel, max_slope: -0.8, max_constant_ratio: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentBoundReport {
    pub level: usize,
    pub options: MomentBoundOptions,
    /// Lags `lo < t <= hi`, measured in sup-norm.
    pub range: (usize, usize),
    /// Dyadic block maxima of the `E |R|^2` envelope.
    pub blocks: Vec<Block>,
    pub slope: Option<f64>,
    pub slope_pass: bool,
    /// `C = max_t E|R(t)|^2 t / 2^{n(t)}` with `n(t)` the level with
    /// `h_{n-1} < t <= h_n`.
    pub constant: f64,
    /// The same maximum over the first block only.
    pub constant_first_block: f64,
    pub constant_ratio: f64,
    pub constant_pass: bool,
    /// The statistics come from the white-noise control, which is expected
    /// to fail.
    pub control: bool,
    pub verdict: Verdict,
}

/// Checks `E |R(t)|^2 <= C 2^n / t`: passes when the log-log slope of the
/// block maxima is at most `max_slope`, or when the level-aware constant
/// over the whole range is within `max_constant_ratio` of its first-block
/// value.
pub fn test_moment_bound(
    stats: &EnsembleStats,
    tower: &Tower,
    options: MomentBoundOptions,
) -> Result<MomentBoundReport> {
    check_tower(stats, tower)?;
    let n = stats.level;
    if n < 2 {
        return Err(Error::RangeEmpty("level 1 has no lags beyond h_1".into()));
    }
    let lo = match options.range_start {
        LagRangeStart::FirstLevel => tower.height(1),
        LagRangeStart::PreviousLevel => tower.height(n - 1),
    } as usize;
    let hi = tower.height(n) as usize / 2;
    if hi <= lo {
        return Err(Error::RangeEmpty(format!("{lo} < t <= {hi}")));
    }
    let env = lag_envelope(&stats.second_moment, tower.height(n) as usize, tower.dimension());
    let blocks = block_maxima(&env, lo, hi)?;
    let control = stats.source == Source::WhiteNoise;
    if blocks.iter().all(|b| b.max == 0.0) {
        return Ok(MomentBoundReport {
            level: n,
            options,
            range: (lo, hi),
            blocks,
            slope: None,
            slope_pass: false,
            constant: 0.0,
            constant_first_block: 0.0,
            constant_ratio: f64::NAN,
            constant_pass: false,
            control,
            verdict: Verdict::VacuousPass,
        });
    }
    let slope = match fit_blocks(blocks.clone(), Weighting::Uniform) {
        Ok(fit) => Some(fit.kappa_hat),
        Err(Error::InvalidParameter { .. }) => None,
        Err(e) => return Err(e),
    };
    let scaled = |t: usize| env[t - 1] * t as f64 / 2f64.powi(level_of(tower, t) as i32);
    let constant = (lo + 1..=hi).map(scaled).fold(0.0, f64::max);
    let first = &blocks[0];
    let constant_first_block = (first.start..first.end).map(scaled).fold(0.0, f64::max);
    let constant_ratio = constant / constant_first_block;
    let slope_pass = slope.is_some_and(|s| s <= options.max_slope);
    let constant_pass = constant_ratio <= options.max_constant_ratio;
    Ok(MomentBoundReport {
        level: n,
        options,
        range: (lo, hi),
        blocks,
        slope,
        slope_pass,
        constant,
        constant_first_block,
        constant_ratio,
        constant_pass,
        control,
        verdict: Verdict::from_bool(slope_pass || constant_pass),
    })
}

/// The level `n` with `h_{n-1} < t <= h_n` (level 1 for `t <= h_1`).
fn level_of(tower: &Tower, t: usize) -> usize {
    tower.heights().iter().position(|&h| t as u64 <= h).map_or(tower.levels(), |i| i + 1)
}
