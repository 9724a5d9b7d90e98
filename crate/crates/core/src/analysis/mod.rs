//! Decay-exponent estimation from dyadic block maxima, and diagnostics of
//! square-summability and mass concentration.

mod decay;
mod diagnostics;

pub use decay::{block_maxima, fit_blocks, kappa_estimate, kappa_estimate_with, Block, DecayFit, Weighting};
pub use diagnostics::{
    lp_increment, lp_norm_profile, lp_pattern, mass_concentration, wiener_average, LpPattern, LpProfile,
    LP_P2_MIN_RATIO, LP_P4_MAX_RATIO,
};
