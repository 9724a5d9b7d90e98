//! Experiment documents, one JSON file per run.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use spectral_decay::analysis::Weighting;
use spectral_decay::ensemble::MomentBoundOptions;
use spectral_decay::iceberg::{AlphaSupport, FunctionSpec, TowerSpec};
use spectral_decay::measures::{Atom, RieszSpec, DEFAULT_CANTOR_DEPTH};

use crate::Invalid;

/// Which coefficient pathway(s) `riesz` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Quadrature always; the closed form too when the spec is lacunary.
    #[default]
    Auto,
    Quadrature,
    Lacunary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszConfig {
    pub riesz: RieszSpec,
    #[serde(default = "default_n_out")]
    pub n_out: usize,
    /// Quadrature grid; the smallest adequate power of two when omitted.
    #[serde(default)]
    pub grid_size: Option<usize>,
    #[serde(default)]
    pub method: Method,
    /// Tail masses for the mass-concentration diagnostic of the density.
    #[serde(default = "default_eps")]
    pub concentration_eps: Vec<f64>,
}

fn default_n_out() -> usize {
    256
}

fn default_eps() -> Vec<f64> {
    vec![0.1, 0.5]
}

/// How the rotation family of an `iceberg` run is produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RotationsConfig {
    Random {
        seed: u64,
        #[serde(default)]
        support: AlphaSupport,
    },
    Morse,
    Explicit {
        values: Vec<Vec<Vec<u64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcebergConfig {
    pub tower: TowerSpec,
    pub rotations: RotationsConfig,
    pub function: FunctionSpec,
}

/// Which statistical tests an `ensemble` run reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSelection {
    #[serde(default = "yes")]
    pub mean_zero: bool,
    #[serde(default = "yes")]
    pub recursion: bool,
    #[serde(default = "yes")]
    pub moment_bound: bool,
}

impl Default for TestSelection {
    fn default() -> Self {
        Self { mean_zero: true, recursion: true, moment_bound: true }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub tower: TowerSpec,
    /// The observable; ignored by the white-noise control.
    pub function: FunctionSpec,
    /// Levels to collect; every level from the function's up to the top
    /// when omitted.
    #[serde(default)]
    pub levels: Option<Vec<usize>>,
    pub replicas: usize,
    pub seed: u64,
    #[serde(default)]
    pub support: AlphaSupport,
    /// Run the white-noise control instead of lifted replicas.
    #[serde(default)]
    pub control: bool,
    #[serde(default)]
    pub tests: TestSelection,
    #[serde(default)]
    pub moment_bound: MomentBoundOptions,
    /// Include full per-lag moments in `stats.json` (CSV files always have them).
    #[serde(default)]
    pub full_stats_json: bool,
}

/// Where `analyze` gets its coefficient sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalyzeInput {
    /// A CSV with columns `t,re[,im]` or `n,re[,im]`; relative paths are
    /// resolved against the config file's directory.
    Csv {
        path: PathBuf,
    },
    Cantor {
        n_out: usize,
        #[serde(default = "default_depth")]
        depth: usize,
    },
    Atomic {
        atoms: Vec<Atom>,
        n_out: usize,
    },
}

fn default_depth() -> usize {
    DEFAULT_CANTOR_DEPTH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassConfig {
    /// CSV whose last column holds nonnegative cell masses or densities
    /// (`density.csv` from `riesz`, `spectral_density.csv` from `iceberg`).
    pub path: PathBuf,
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub input: AnalyzeInput,
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    /// Cut-offs `N` for the Wiener average; needs `c(n)` for `|n| <= N`.
    #[serde(default)]
    pub wiener: Vec<usize>,
    #[serde(default)]
    pub weighting: Weighting,
    /// Tabulate `c(3n)` against `c(n)` for `1 <= n <= this`.
    #[serde(default)]
    pub self_similarity: Option<usize>,
    #[serde(default)]
    pub mass: Option<MassConfig>,
}

fn default_p() -> Vec<f64> {
    vec![2.0, 4.0]
}

/// Reads and parses a config; failures are validation errors.
pub fn load<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Invalid(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Invalid(format!("invalid config {}: {e}", path.display())))
        .context("parsing config")
}
