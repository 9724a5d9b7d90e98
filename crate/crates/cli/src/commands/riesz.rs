use std::path::Path;

use serde::Serialize;
use spectral_decay::analysis::{mass_concentration, Weighting};
use spectral_decay::measures::{riesz_coeffs_lacunary, riesz_coeffs_quadrature, riesz_density};

use super::write_decay_fit;
use crate::config::{load, Method, RieszConfig};
use crate::output::OutDir;
use crate::Invalid;

#[derive(Serialize)]
struct Summary {
    lacunary: bool,
    method: Method,
    n_out: usize,
    grid_size: usize,
    files: Vec<&'static str>,
    /// `max |c_quadrature(n) - c_lacunary(n)|` when both pathways ran.
    pathway_max_abs_diff: Option<f64>,
    kappa_hat: Option<f64>,
    mass_concentration: Vec<(f64, f64)>,
}

pub fn run(config: &Path, out: &OutDir, method: Option<Method>, n_out: Option<usize>) -> anyhow::Result<()> {
    let mut cfg: RieszConfig = load(config)?;
    if let Some(m) = method {
        cfg.method = m;
    }
    if let Some(n) = n_out {
        cfg.n_out = n;
    }
    if cfg.n_out == 0 {
        return Err(Invalid("n_out must be positive".into()).into());
    }
    let spec = &cfg.riesz;
    let grid = cfg.grid_size.unwrap_or_else(|| spec.min_grid_size(cfg.n_out));
    let mut files = Vec::new();

    let lacunary = match cfg.method {
        Method::Lacunary => Some(riesz_coeffs_lacunary(spec, cfg.n_out)?),
        Method::Auto if spec.is_lacunary() => Some(riesz_coeffs_lacunary(spec, cfg.n_out)?),
        _ => None,
    };
    let quadrature = match cfg.method {
        Method::Lacunary => None,
        _ => Some(riesz_coeffs_quadrature(spec, grid, cfg.n_out)?),
    };
    let density = riesz_density(spec, grid)?;

    if let Some(q) = &quadrature {
        out.write("coeffs_quadrature.csv", |mut w| q.write_csv(&mut w))?;
        files.push("coeffs_quadrature.csv");
    }
    if let Some(l) = &lacunary {
        out.write("coeffs_lacunary.csv", |mut w| l.write_csv(&mut w))?;
        files.push("coeffs_lacunary.csv");
    }
    out.write("density.csv", |mut w| density.write_csv(&mut w))?;
    files.push("density.csv");

    let primary = lacunary.as_ref().or(quadrature.as_ref()).expect("one pathway ran");
    let fit = write_decay_fit(out, "", &primary.positive_magnitudes(), Weighting::Uniform)?;
    if fit.kappa().is_some() {
        files.extend(["decay_fit.json", "decay_blocks.csv", "decay_plot.csv"]);
    }
    let masses = density.cell_masses();
    let concentration = cfg
        .concentration_eps
        .iter()
        .map(|&eps| Ok((eps, mass_concentration(&masses, eps)?)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let diff = match (&quadrature, &lacunary) {
        (Some(q), Some(l)) => Some(q.max_abs_diff(l)),
        _ => None,
    };
    files.push("summary.json");
    let summary = Summary {
        lacunary: spec.is_lacunary(),
        method: cfg.method,
        n_out: cfg.n_out,
        grid_size: grid,
        files,
        pathway_max_abs_diff: diff,
        kappa_hat: fit.kappa(),
        mass_concentration: concentration,
    };
    out.json("summary.json", &summary)?;

    println!("riesz: {} factors, lacunary = {}, grid {grid}, n_out {}", spec.len(), summary.lacunary, cfg.n_out);
    if let Some(d) = diff {
        println!(
            "pathways agree to max |diff| = {d:.3e}{}",
            if d <= 1e-10 { " (within 1e-10)" } else { " (EXCEEDS 1e-10)" }
        );
    }
    if let Some(k) = summary.kappa_hat {
        println!("kappa_hat = {k:.4}");
    }
    Ok(())
}
