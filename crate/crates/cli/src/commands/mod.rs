pub mod analyze;
pub mod ensemble;
pub mod iceberg;
pub mod riesz;

use serde::Serialize;
use spectral_decay::analysis::{kappa_estimate_with, DecayFit, Weighting};

use crate::output::OutDir;

/// Writes `decay_fit.json`, `decay_blocks.csv` and `decay_plot.csv` when the
/// sequence is long enough to fit; returns the fit or the reason it was skipped.
pub(crate) fn write_decay_fit(
    out: &OutDir,
    prefix: &str,
    mags: &[f64],
    weighting: Weighting,
) -> anyhow::Result<FitOutcome> {
    match kappa_estimate_with(mags, weighting) {
        Ok(fit) => {
            out.json(&format!("{prefix}decay_fit.json"), &fit)?;
            out.write(&format!("{prefix}decay_blocks.csv"), |mut w| fit.write_csv(&mut w))?;
            out.write(&format!("{prefix}decay_plot.csv"), |mut w| fit.write_plot_data(&mut w))?;
            Ok(FitOutcome::Fitted(fit))
        }
        Err(e) => Ok(FitOutcome::Skipped(e.to_string())),
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub(crate) enum FitOutcome {
    Fitted(DecayFit),
    Skipped(String),
}

impl FitOutcome {
    pub(crate) fn kappa(&self) -> Option<f64> {
        match self {
            FitOutcome::Fitted(fit) => Some(fit.kappa_hat),
            FitOutcome::Skipped(_) => None,
        }
    }
}
