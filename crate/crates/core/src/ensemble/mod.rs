//! Monte Carlo ensembles over random rotation families: per-lag moments of
//! the correlation sequence and the statistical tests built on them.

mod reports;
mod stats;

pub use reports::{
    coefficient_of_variation, test_mean_zero, test_moment_bound, test_recursion, LagRangeStart, MeanZeroReport,
    MomentBoundOptions, MomentBoundReport, RecursionReport, Verdict, MAX_REPLICA_CV, RECURSION_BAND, REQUIRED_FRACTION,
    Z_THRESHOLD,
};
pub use stats::{
    eligible_lags, replica_seed, run_ensemble, run_ensemble_fixed, run_ensemble_levels, run_white_noise, EnsembleStats,
    MomentAccumulator, Source,
};
