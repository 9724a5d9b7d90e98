use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::{fmt_f64, write_row};

/// How the dyadic blocks are weighted in the log-log regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Ordinary least squares.
    #[default]
    Uniform,
    /// Each block weighted by the number of lags it covers.
    LagCount,
}

/// The maximum of a sequence over the lags `start..end` inside the dyadic
/// range `[2^j, 2^{j+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub j: u32,
    pub start: usize,
    pub end: usize,
    pub argmax: usize,
    pub max: f64,
}

/// A log-log fit `log2 M_j ~ intercept + kappa_hat * j` to dyadic block maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub kappa_hat: f64,
    pub intercept: f64,
    /// Blocks with a nonzero maximum, in increasing order.
    pub blocks: Vec<Block>,
    /// Indices `j` of the blocks left out because their maximum is zero.
    pub dropped_blocks: Vec<u32>,
    /// Root-mean-square residual of the fit, in `log2` units.
    pub residual: f64,
    pub weighting: Weighting,
}

impl DecayFit {
    /// CSV with one row per block: `j,start,end,argmax,max`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write_row(w, &["j", "start", "end", "argmax", "max"].map(String::from))?;
        for b in &self.blocks {
            write_row(
                w,
                &[b.j.to_string(), b.start.to_string(), b.end.to_string(), b.argmax.to_string(), fmt_f64(b.max)],
            )?;
        }
        Ok(())
    }

    /// Two-column plot data `log2_t,log2_max`, with `t` the block start.
    pub fn write_plot_data<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write_row(w, &["log2_t", "log2_max"].map(String::from))?;
        for b in &self.blocks {
            write_row(w, &[fmt_f64((b.start as f64).log2()), fmt_f64(b.max.log2())])?;
        }
        Ok(())
    }
}

/// Maxima of `mags` over dyadic blocks restricted to lags `lo < t <= hi`,
/// where `mags[t - 1]` is the value at lag `t`. Blocks not meeting the range
/// are omitted; blocks with zero maximum are kept.
pub fn block_maxima(mags: &[f64], lo: usize, hi: usize) -> Result<Vec<Block>> {
    if hi > mags.len() {
        return Err(Error::RangeTooLarge { requested: hi, available: mags.len() });
    }
    if let Some(t) = mags.iter().position(|m| !m.is_finite() || *m < 0.0) {
        return Err(invalid("sequence", format!("value at t = {} is not a finite nonnegative number", t + 1)));
    }
    if hi <= lo {
        return Err(Error::RangeEmpty(format!("{lo} < t <= {hi}")));
    }
    let mut blocks = Vec::new();
    let mut j = 0u32;
    loop {
        let (block_lo, block_hi) = (1usize << j, 1usize << (j + 1));
        if block_lo > hi {
            break;
        }
        let start = block_lo.max(lo + 1);
        let end = block_hi.min(hi + 1);
        if start < end {
            let (argmax, max) =
                (start..end).fold(
                    (start, mags[start - 1]),
                    |(bt, bm), t| {
                        if mags[t - 1] > bm {
                            (t, mags[t - 1])
                        } else {
                            (bt, bm)
                        }
                    },
                );
            blocks.push(Block { j, start, end, argmax, max });
        }
        j += 1;
    }
    Ok(blocks)
}

/// Fits `log2 max` against `j` over the nonzero blocks.
pub fn fit_blocks(blocks: Vec<Block>, weighting: Weighting) -> Result<DecayFit> {
    let (kept, dropped): (Vec<Block>, Vec<Block>) = blocks.into_iter().partition(|b| b.max > 0.0);
    if kept.is_empty() {
        return Err(Error::AllBlocksZero);
    }
    if kept.len() < 2 {
        return Err(invalid("sequence", "need at least two nonzero dyadic blocks to fit a slope"));
    }
    let points: Vec<(f64, f64, f64)> = kept
        .iter()
        .map(|b| {
            let w = match weighting {
                Weighting::Uniform => 1.0,
                Weighting::LagCount => (b.end - b.start) as f64,
            };
            (b.j as f64, b.max.log2(), w)
        })
        .collect();
    let sw: f64 = points.iter().map(|p| p.2).sum();
    let mx = points.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = points.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = points.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let kappa_hat = sxy / sxx;
    let intercept = my - kappa_hat * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - kappa_hat * p.0).powi(2)).sum();
    let residual = (sse / points.len() as f64).sqrt();
    Ok(DecayFit {
        kappa_hat,
        intercept,
        blocks: kept,
        dropped_blocks: dropped.iter().map(|b| b.j).collect(),
        residual,
        weighting,
    })
}

/// Decay exponent of `|c_t|`, `t = 1..=T`, given as `mags[t - 1]`.
pub fn kappa_estimate(mags: &[f64]) -> Result<DecayFit> {
    kappa_estimate_with(mags, Weighting::Uniform)
}

pub fn kappa_estimate_with(mags: &[f64], weighting: Weighting) -> Result<DecayFit> {
    if mags.len() < 8 {
        return Err(invalid("sequence", format!("need T >= 8 lags, got {}", mags.len())));
    }
    fit_blocks(block_maxima(mags, 0, mags.len())?, weighting)
}
