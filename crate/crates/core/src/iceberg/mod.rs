//! Finite levels of an iceberg-type `Z^d` action: the lattice tower
//! `h_{n+1} = q_n h_n`, the rotations `alpha_{n,gamma}`, lifted cylindric
//! functions and their circular correlations.

mod correlation;
mod document;
mod function;
mod rotations;
mod tower;

pub use correlation::{
    circular_correlation, correlation, lag_envelope, lag_norm, spectral_density, CorrelationSeq, SpectralDensity,
};
pub use document::IcebergDocument;
pub use function::{
    descend, lift, lift_levels, shift_at_level, write_lifted_csv, CylindricFunction, FunctionSpec, MEAN_ZERO_TOL,
};
pub use rotations::{
    morse_rotations, sample_rotations, sample_rotations_with, AlphaSupport, Provenance, RotationFamily,
};
pub use tower::{build_tower, Tower, TowerSpec};
