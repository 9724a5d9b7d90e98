use std::path::Path;

use serde::Serialize;
use spectral_decay::analysis::Weighting;
use spectral_decay::iceberg::{
    build_tower, correlation, lift_levels, morse_rotations, sample_rotations_with, spectral_density, write_lifted_csv,
    IcebergDocument, Provenance, RotationFamily,
};

use super::{write_decay_fit, FitOutcome};
use crate::config::{load, IcebergConfig, RotationsConfig};
use crate::output::OutDir;

#[derive(Serialize)]
struct LevelSummary {
    level: usize,
    height: u64,
    norm0: f64,
    lifted: String,
    correlation: String,
}

#[derive(Serialize)]
struct Summary {
    dimension: usize,
    heights: Vec<u64>,
    provenance: Provenance,
    function_level: usize,
    mean_zero: bool,
    levels: Vec<LevelSummary>,
    spectral_density_total: f64,
    envelope_fit: FitOutcome,
}

pub fn run(config: &Path, out: &OutDir, seed: Option<u64>) -> anyhow::Result<()> {
    let mut cfg: IcebergConfig = load(config)?;
    if let (Some(s), RotationsConfig::Random { seed, .. }) = (seed, &mut cfg.rotations) {
        *seed = s;
    }
    let tower = build_tower(&cfg.tower)?;
    let rotations = match &cfg.rotations {
        RotationsConfig::Random { seed, support } => sample_rotations_with(&tower, *seed, *support),
        RotationsConfig::Morse => morse_rotations(&tower)?,
        RotationsConfig::Explicit { values } => RotationFamily::explicit(&tower, values.clone())?,
    };
    let f = cfg.function.build(&tower)?;
    let top = tower.levels();
    let lifted = lift_levels(&f, &tower, &rotations, top)?;
    out.json("rotations.json", &IcebergDocument::new(&tower, rotations.clone()))?;

    let mut levels = Vec::new();
    let mut top_corr = None;
    for (values, m) in lifted.iter().zip(f.level()..=top) {
        let corr = correlation(&tower, m, values)?;
        let (lifted_name, corr_name) = (format!("lifted_level{m}.csv"), format!("correlation_level{m}.csv"));
        out.write(&lifted_name, |mut w| write_lifted_csv(&mut w, &tower, m, values))?;
        out.write(&corr_name, |mut w| corr.write_csv(&mut w))?;
        levels.push(LevelSummary {
            level: m,
            height: tower.height(m),
            norm0: corr.norm0(),
            lifted: lifted_name,
            correlation: corr_name,
        });
        top_corr = Some(corr);
    }
    let top_corr = top_corr.expect("at least one level");
    let density = spectral_density(&tower, top, lifted.last().unwrap())?;
    out.write("spectral_density.csv", |mut w| density.write_csv(&mut w))?;
    let envelope = top_corr.envelope();
    let envelope_fit = write_decay_fit(out, "", &envelope, Weighting::Uniform)?;

    let summary = Summary {
        dimension: tower.dimension(),
        heights: tower.heights().to_vec(),
        provenance: rotations.provenance(),
        function_level: f.level(),
        mean_zero: f.is_mean_zero(),
        levels,
        spectral_density_total: density.total(),
        envelope_fit,
    };
    out.json("summary.json", &summary)?;
    println!("iceberg: d = {}, heights {:?}, levels {}..={top} written", tower.dimension(), tower.heights(), f.level());
    if let Some(k) = summary.envelope_fit.kappa() {
        println!("top-level |R| envelope: kappa_hat = {k:.4}");
    }
    Ok(())
}
