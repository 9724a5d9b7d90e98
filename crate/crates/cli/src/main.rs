//! `spectral-decay`: reproducible experiments on singular measures and
//! iceberg-type actions, driven by JSON configs.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 runtime failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Method;

#[derive(Parser)]
#[command(name = "spectral-decay", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Riesz-product coefficients (both pathways when lacunary), density and decay fit.
    Riesz {
        #[command(flatten)]
        common: Common,
        /// Coefficient pathway; overrides the config.
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Largest coefficient index; overrides the config.
        #[arg(long)]
        n_out: Option<usize>,
    },
    /// Tower, rotations, lifted function, correlations and spectral density.
    Iceberg {
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo moments over random rotation families and their tests.
    Ensemble {
        #[command(flatten)]
        common: Common,
    },
    /// Decay exponent, Wiener averages, l^p profiles and mass concentration.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, env = "SPECTRAL_DECAY_OUT", default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Caps the number of worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

/// A usage or validation failure (exit code 2).
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

/// Library errors describe rejected input; everything else (I/O while
/// writing, thread-pool setup) is a runtime failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    let invalid =
        err.chain().any(|e| e.is::<Invalid>() || e.is::<spectral_decay::Error>() || e.is::<serde_json::Error>());
    if invalid {
        2
    } else {
        3
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let common = match &cli.command {
        Command::Riesz { common, .. }
        | Command::Iceberg { common }
        | Command::Ensemble { common }
        | Command::Analyze { common } => common,
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Invalid("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let out = output::OutDir::create(&common.out)?;
    match &cli.command {
        Command::Riesz { common, method, n_out } => commands::riesz::run(&common.config, &out, *method, *n_out),
        Command::Iceberg { common } => commands::iceberg::run(&common.config, &out, common.seed),
        Command::Ensemble { common } => commands::ensemble::run(&common.config, &out, common.seed),
        Command::Analyze { common } => commands::analyze::run(&common.config, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
