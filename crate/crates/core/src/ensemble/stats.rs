use std::collections::BTreeMap;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_sum::ExactSum;
use crate::iceberg::{
    circular_correlation, lift_levels, sample_rotations_with, AlphaSupport, CylindricFunction, RotationFamily, Tower,
    TowerSpec,
};
use crate::io::{fmt_f64, ravel, unravel, write_row};

/// Where the replicas of an ensemble come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    /// A fixed function lifted through independent random rotation families.
    Lifted { support: AlphaSupport },
    /// Every replica uses the same given rotation family.
    Fixed,
    /// A fresh balanced `+-1` function drawn directly on `M_n`, no lift.
    WhiteNoise,
}

/// Per-lag Monte Carlo moments of `R(t)` at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub tower: TowerSpec,
    pub level: usize,
    pub replica_count: usize,
    pub seed: u64,
    pub source: Source,
    /// `E R(t)`, row-major over `M_level`.
    pub mean: Vec<Complex64>,
    /// `E |R(t)|^2`.
    pub second_moment: Vec<f64>,
    /// Sample variance `sum |R - mean|^2 / (R - 1)`.
    pub variance: Vec<f64>,
    /// Per replica, the mean of `|R(t)|^2` over `t` in `Gamma_{n-1}` minus the
    /// origin (empty at level 1), in replica order.
    pub replica_eligible_means: Vec<f64>,
}

impl EnsembleStats {
    pub fn side(&self) -> usize {
        (self.second_moment.len() as f64).powf(1.0 / self.dimension() as f64).round() as usize
    }

    pub fn dimension(&self) -> usize {
        self.tower.dimension
    }

    /// Unnormalized `sum_t E |R(t)|^2`.
    pub fn l2_sum(&self) -> f64 {
        self.second_moment.iter().copied().collect::<ExactSum>().value()
    }

    /// `l2_sum / h^d`, the lag-average of `E |R(t)|^2`.
    pub fn l2_mean(&self) -> f64 {
        self.l2_sum() / self.second_moment.len() as f64
    }

    /// CSV with columns `t,mean_re,mean_im,second_moment,variance`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let dim = self.dimension();
        let side = self.side();
        let mut header: Vec<String> =
            if dim == 1 { vec!["t".into()] } else { (1..=dim).map(|i| format!("t{i}")).collect() };
        header.extend(["mean_re", "mean_im", "second_moment", "variance"].map(String::from));
        write_row(w, &header)?;
        for idx in 0..self.mean.len() {
            let mut row: Vec<String> = unravel(idx, side, dim).iter().map(|c| c.to_string()).collect();
            row.extend([
                fmt_f64(self.mean[idx].re),
                fmt_f64(self.mean[idx].im),
                fmt_f64(self.second_moment[idx]),
                fmt_f64(self.variance[idx]),
            ]);
            write_row(w, &row)?;
        }
        Ok(())
    }
}

/// Row-major indices in `M_level` of the lags `h_{n-1} s`, `s` in
/// `[0, q_{n-1})^d` minus the origin. Empty at level 1.
pub fn eligible_lags(tower: &Tower, level: usize) -> Vec<usize> {
    if level < 2 {
        return Vec::new();
    }
    let h_prev = tower.height(level - 1) as usize;
    let side = tower.height(level) as usize;
    let q = tower.factor(level - 1) as usize;
    (1..tower.coset_count(level - 1))
        .map(|s| {
            let coords: Vec<usize> = unravel(s, q, tower.dimension()).into_iter().map(|c| c * h_prev).collect();
            ravel(&coords, side)
        })
        .collect()
}

/// Seed of replica `r`: the first output of ChaCha8 seeded by `seed` on
/// stream `r`.
pub fn replica_seed(seed: u64, replica: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng.next_u64()
}

/// Streaming first and second moments with exact, order-insensitive merging:
/// any partition of the replicas, accumulated and merged in any order, gives
/// bitwise-identical statistics.
#[derive(Debug, Clone)]
pub struct MomentAccumulator {
    eligible: Vec<usize>,
    count: usize,
    sum_re: Vec<ExactSum>,
    sum_im: Vec<ExactSum>,
    sum_sq: Vec<ExactSum>,
    replica_means: BTreeMap<u64, f64>,
}

impl MomentAccumulator {
    pub fn new(lags: usize, eligible: Vec<usize>) -> Self {
        Self {
            eligible,
            count: 0,
            sum_re: vec![ExactSum::new(); lags],
            sum_im: vec![ExactSum::new(); lags],
            sum_sq: vec![ExactSum::new(); lags],
            replica_means: BTreeMap::new(),
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Adds replica `replica`'s correlation sequence. Each replica index may
    /// be added once across all merged accumulators.
    pub fn add(&mut self, replica: u64, corr: &[Complex64]) {
        assert_eq!(corr.len(), self.sum_sq.len(), "lag count");
        for (i, r) in corr.iter().enumerate() {
            self.sum_re[i].add(r.re);
            self.sum_im[i].add(r.im);
            self.sum_sq[i].add(r.norm_sqr());
        }
        if !self.eligible.is_empty() {
            let s: ExactSum = self.eligible.iter().map(|&i| corr[i].norm_sqr()).collect();
            let previous = self.replica_means.insert(replica, s.value() / self.eligible.len() as f64);
            assert!(previous.is_none(), "replica {replica} added twice");
        }
        self.count += 1;
    }

    pub fn merge(mut self, other: Self) -> Self {
        for (a, b) in
            [(&mut self.sum_re, &other.sum_re), (&mut self.sum_im, &other.sum_im), (&mut self.sum_sq, &other.sum_sq)]
        {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        for (k, v) in other.replica_means {
            assert!(self.replica_means.insert(k, v).is_none(), "replica {k} added twice");
        }
        self.count += other.count;
        self
    }

    pub fn finish(self, tower: &Tower, level: usize, seed: u64, source: Source) -> Result<EnsembleStats> {
        if self.count < 2 {
            return Err(Error::TooFewReplicas(self.count));
        }
        let r = self.count as f64;
        let mut mean = Vec::with_capacity(self.sum_sq.len());
        let mut second_moment = Vec::with_capacity(self.sum_sq.len());
        let mut variance = Vec::with_capacity(self.sum_sq.len());
        for i in 0..self.sum_sq.len() {
            let (sre, sim, ssq) = (self.sum_re[i].value(), self.sum_im[i].value(), self.sum_sq[i].value());
            let m = Complex64::new(sre / r, sim / r);
            mean.push(m);
            second_moment.push(ssq / r);
            // sum |R - m|^2 = sum |R|^2 - R |m|^2, exact up to the final roundings.
            let mut centred = self.sum_sq[i].clone();
            centred.add(-sre * m.re);
            centred.add(-sim * m.im);
            variance.push((centred.value() / (r - 1.0)).max(0.0));
        }
        Ok(EnsembleStats {
            tower: tower.spec().clone(),
            level,
            replica_count: self.count,
            seed,
            source,
            mean,
            second_moment,
            variance,
            replica_eligible_means: self.replica_means.into_values().collect(),
        })
    }
}

fn check_inputs(tower: &Tower, levels: &[usize], replicas: usize, lowest: usize) -> Result<()> {
    tower.check_supported_dimension()?;
    if replicas < 2 {
        return Err(Error::TooFewReplicas(replicas));
    }
    if levels.is_empty() {
        return Err(Error::Empty("levels"));
    }
    for &m in levels {
        if m < lowest || m > tower.levels() {
            return Err(Error::LevelOutOfRange { level: m, lo: lowest, hi: tower.levels() });
        }
    }
    Ok(())
}

/// Runs `replicas` independent replicas in parallel; `replica(r)` returns the
/// correlation sequence of replica `r` at each requested level.
fn run_replicas<F>(tower: &Tower, levels: &[usize], replicas: usize, replica: F) -> Vec<MomentAccumulator>
where
    F: Fn(u64) -> Vec<Vec<Complex64>> + Sync,
{
    let fresh = || -> Vec<MomentAccumulator> {
        levels.iter().map(|&m| MomentAccumulator::new(tower.points(m), eligible_lags(tower, m))).collect()
    };
    (0..replicas as u64)
        .into_par_iter()
        .fold(fresh, |mut accs, r| {
            for (acc, corr) in accs.iter_mut().zip(replica(r)) {
                acc.add(r, &corr);
            }
            accs
        })
        .reduce(fresh, |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect())
}

/// Moments at one level over random rotation families drawn from all of `M_n`.
pub fn run_ensemble(
    tower: &Tower,
    f: &CylindricFunction,
    level: usize,
    replicas: usize,
    seed: u64,
) -> Result<EnsembleStats> {
    Ok(run_ensemble_levels(tower, f, &[level], replicas, seed, AlphaSupport::Full)?.remove(0))
}

/// Moments at several levels from the same replicas: replica `r` lifts `f`
/// once through the family sampled with [`replica_seed`]`(seed, r)`.
pub fn run_ensemble_levels(
    tower: &Tower,
    f: &CylindricFunction,
    levels: &[usize],
    replicas: usize,
    seed: u64,
    support: AlphaSupport,
) -> Result<Vec<EnsembleStats>> {
    if !f.is_mean_zero() {
        return Err(Error::NotMeanZero(f.mean_abs()));
    }
    check_inputs(tower, levels, replicas, f.level())?;
    let top = *levels.iter().max().unwrap();
    let dim = tower.dimension();
    let accs = run_replicas(tower, levels, replicas, |r| {
        let rotations = sample_rotations_with(tower, replica_seed(seed, r), support);
        let lifted = lift_levels(f, tower, &rotations, top).expect("inputs validated");
        levels.iter().map(|&m| circular_correlation(&lifted[m - f.level()], tower.height(m) as usize, dim)).collect()
    });
    finish_all(accs, tower, levels, seed, Source::Lifted { support })
}

/// Every replica uses `rotations`; the moments are those of a single
/// deterministic sequence.
pub fn run_ensemble_fixed(
    tower: &Tower,
    f: &CylindricFunction,
    level: usize,
    replicas: usize,
    rotations: &RotationFamily,
) -> Result<EnsembleStats> {
    if !f.is_mean_zero() {
        return Err(Error::NotMeanZero(f.mean_abs()));
    }
    check_inputs(tower, &[level], replicas, f.level())?;
    rotations.validate(tower)?;
    let lifted = lift_levels(f, tower, rotations, level)?.pop().unwrap();
    let corr = circular_correlation(&lifted, tower.height(level) as usize, tower.dimension());
    let accs = run_replicas(tower, &[level], replicas, |_| vec![corr.clone()]);
    Ok(finish_all(accs, tower, &[level], 0, Source::Fixed)?.remove(0))
}

/// Control ensemble: replica `r` draws a balanced `+-1` function directly on
/// `M_level` with seed [`replica_seed`]`(seed, r)`.
pub fn run_white_noise(tower: &Tower, levels: &[usize], replicas: usize, seed: u64) -> Result<Vec<EnsembleStats>> {
    check_inputs(tower, levels, replicas, 1)?;
    let dim = tower.dimension();
    let accs = run_replicas(tower, levels, replicas, |r| {
        levels
            .iter()
            .map(|&m| {
                let f = CylindricFunction::random_sign(tower, m, replica_seed(seed, r)).expect("even point count");
                circular_correlation(f.values(), tower.height(m) as usize, dim)
            })
            .collect()
    });
    finish_all(accs, tower, levels, seed, Source::WhiteNoise)
}

fn finish_all(
    accs: Vec<MomentAccumulator>,
    tower: &Tower,
    levels: &[usize],
    seed: u64,
    source: Source,
) -> Result<Vec<EnsembleStats>> {
    accs.into_iter().zip(levels).map(|(acc, &m)| acc.finish(tower, m, seed, source)).collect()
}
