use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use spectral_decay::analysis::{kappa_estimate_with, lp_norm_profile, mass_concentration, wiener_average, DecayFit};
use spectral_decay::io::fmt_f64;
use spectral_decay::measures::{atomic_coeffs, cantor_coeffs, AtomicMeasure};
use spectral_decay::FourierSeq;

use crate::config::{load, AnalyzeConfig, AnalyzeInput};
use crate::output::OutDir;
use crate::Invalid;

/// Coefficients keyed by index, as read from a file or generated.
struct Series {
    column: &'static str,
    values: BTreeMap<i64, Complex64>,
}

impl Series {
    fn from_seq(seq: &FourierSeq) -> Self {
        let n = seq.max_index() as i64;
        Self { column: "n", values: (-n..=n).map(|k| (k, seq.at(k))).collect() }
    }

    /// `|c_t|` for `t = 1, 2, ...` up to the first missing index.
    fn positive_magnitudes(&self) -> anyhow::Result<Vec<f64>> {
        let mags: Vec<f64> = (1..).map_while(|t| self.values.get(&t).map(|c| c.norm())).collect();
        let positive = self.values.range(1..).count();
        if mags.len() != positive {
            return Err(Invalid(format!(
                "{} = {} is missing: positive indices must be contiguous from 1",
                self.column,
                mags.len() + 1
            ))
            .into());
        }
        Ok(mags)
    }

    /// The two-sided sequence up to `|n| <= max`, extended hermitianly when
    /// only nonnegative indices are present.
    fn two_sided(&self, max: usize) -> anyhow::Result<FourierSeq> {
        let m = max as i64;
        if (-m..=m).all(|k| self.values.contains_key(&k)) {
            return Ok(FourierSeq::from_fn(max, |k| self.values[&k])?);
        }
        if (0..=m).all(|k| self.values.contains_key(&k)) {
            let nonneg: Vec<Complex64> = (0..=m).map(|k| self.values[&k]).collect();
            return Ok(FourierSeq::from_nonnegative(&nonneg)?);
        }
        Err(Invalid(format!("Wiener average up to N = {max} needs c(n) for 0 <= n <= {max}")).into())
    }
}

fn resolve(config: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        config.parent().unwrap_or(Path::new(".")).join(path)
    }
}

fn invalid_at(path: &Path, line: Option<u64>, msg: impl std::fmt::Display) -> anyhow::Error {
    match line {
        Some(l) => Invalid(format!("{}: line {l}: {msg}", path.display())).into(),
        None => Invalid(format!("{}: {msg}", path.display())).into(),
    }
}

fn open_csv(path: &Path) -> anyhow::Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new().from_path(path).map_err(|e| invalid_at(path, e.position().map(|p| p.line()), e))
}

/// Reads `t,re[,im]` or `n,re[,im]`; other columns are ignored.
fn read_series(path: &Path) -> anyhow::Result<Series> {
    let mut reader = open_csv(path)?;
    let headers = reader.headers().map_err(|e| invalid_at(path, Some(1), e))?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (column, idx_col) = match (find("t"), find("n")) {
        (Some(i), _) => ("t", i),
        (None, Some(i)) => ("n", i),
        _ => return Err(invalid_at(path, Some(1), "header needs a `t` or `n` column")),
    };
    let re_col = find("re").ok_or_else(|| invalid_at(path, Some(1), "header needs a `re` column"))?;
    let im_col = find("im");
    let mut values = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| invalid_at(path, e.position().map(|p| p.line()), e))?;
        let line = record.position().map(|p| p.line());
        let field = |i: usize| record.get(i).map(str::trim).ok_or_else(|| invalid_at(path, line, "missing field"));
        let index: i64 = field(idx_col)?.parse().map_err(|e| invalid_at(path, line, format!("bad {column}: {e}")))?;
        let re: f64 = field(re_col)?.parse().map_err(|e| invalid_at(path, line, format!("bad re: {e}")))?;
        let im: f64 = match im_col {
            Some(c) => field(c)?.parse().map_err(|e| invalid_at(path, line, format!("bad im: {e}")))?,
            None => 0.0,
        };
        if !re.is_finite() || !im.is_finite() {
            return Err(invalid_at(path, line, "non-finite value"));
        }
        if values.insert(index, Complex64::new(re, im)).is_some() {
            return Err(invalid_at(path, line, format!("duplicate {column} = {index}")));
        }
    }
    if values.is_empty() {
        return Err(invalid_at(path, None, "empty input: no data rows"));
    }
    Ok(Series { column, values })
}

/// The last column of each row, as nonnegative masses.
fn read_masses(path: &Path) -> anyhow::Result<Vec<f64>> {
    let mut reader = open_csv(path)?;
    let mut masses = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| invalid_at(path, e.position().map(|p| p.line()), e))?;
        let line = record.position().map(|p| p.line());
        let last = record.iter().next_back().ok_or_else(|| invalid_at(path, line, "empty row"))?;
        masses.push(last.trim().parse::<f64>().map_err(|e| invalid_at(path, line, e))?);
    }
    if masses.is_empty() {
        return Err(invalid_at(path, None, "empty input: no data rows"));
    }
    Ok(masses)
}

#[derive(Serialize)]
struct LpSummary {
    p: f64,
    file: String,
    t_max: usize,
    total: f64,
    last_increment: Option<f64>,
}

#[derive(Serialize)]
struct Summary {
    terms: usize,
    fit: DecayFit,
    wiener: Vec<(usize, f64)>,
    lp: Vec<LpSummary>,
    self_similarity_max_abs_diff: Option<f64>,
    mass_concentration: Vec<(f64, f64)>,
}

pub fn run(config: &Path, out: &OutDir) -> anyhow::Result<()> {
    let cfg: AnalyzeConfig = load(config)?;
    let series = match &cfg.input {
        AnalyzeInput::Csv { path } => read_series(&resolve(config, path))?,
        AnalyzeInput::Cantor { n_out, depth } => {
            let seq = cantor_coeffs(*n_out, *depth)?;
            out.write("coeffs.csv", |mut w| seq.write_csv(&mut w))?;
            Series::from_seq(&seq)
        }
        AnalyzeInput::Atomic { atoms, n_out } => {
            let seq = atomic_coeffs(&AtomicMeasure::new(atoms.clone())?, *n_out)?;
            out.write("coeffs.csv", |mut w| seq.write_csv(&mut w))?;
            Series::from_seq(&seq)
        }
    };
    let mags = series.positive_magnitudes()?;
    let fit = kappa_estimate_with(&mags, cfg.weighting)?;
    out.json("decay_fit.json", &fit)?;
    out.write("decay_blocks.csv", |mut w| fit.write_csv(&mut w))?;
    out.write("decay_plot.csv", |mut w| fit.write_plot_data(&mut w))?;

    let mut wiener = Vec::new();
    for &n in &cfg.wiener {
        wiener.push((n, wiener_average(&series.two_sided(n)?, n)?));
    }
    if !wiener.is_empty() {
        out.write("wiener.csv", |w| {
            writeln!(w, "N,average")?;
            for (n, v) in &wiener {
                writeln!(w, "{n},{}", fmt_f64(*v))?;
            }
            Ok(())
        })?;
    }

    let mut lp = Vec::new();
    for &p in &cfg.p {
        let profile = lp_norm_profile(&mags, p, mags.len())?;
        let file = format!("lp_profile_p{p}.csv");
        out.write(&file, |mut w| profile.write_csv(&mut w))?;
        lp.push(LpSummary {
            p,
            file,
            t_max: mags.len(),
            total: profile.points.last().map_or(0.0, |x| x.1),
            last_increment: profile.increments().last().map(|x| x.1),
        });
    }

    let self_similarity_max_abs_diff = match cfg.self_similarity {
        Some(k) => {
            let mut rows = Vec::with_capacity(k);
            for n in 1..=k as i64 {
                let (a, b) = match (series.values.get(&n), series.values.get(&(3 * n))) {
                    (Some(a), Some(b)) => (*a, *b),
                    _ => return Err(Invalid(format!("self-similarity table needs c({n}) and c({})", 3 * n)).into()),
                };
                rows.push((n, a, b));
            }
            out.write("self_similarity.csv", |w| {
                writeln!(w, "n,re_n,im_n,re_3n,im_3n,abs_diff")?;
                for (n, a, b) in &rows {
                    writeln!(
                        w,
                        "{n},{},{},{},{},{}",
                        fmt_f64(a.re),
                        fmt_f64(a.im),
                        fmt_f64(b.re),
                        fmt_f64(b.im),
                        fmt_f64((a - b).norm())
                    )?;
                }
                Ok(())
            })?;
            Some(rows.iter().map(|(_, a, b)| (a - b).norm()).fold(0.0, f64::max))
        }
        None => None,
    };

    let mut concentration = Vec::new();
    if let Some(mass) = &cfg.mass {
        let masses = read_masses(&resolve(config, &mass.path))?;
        for &eps in &mass.eps {
            concentration.push((eps, mass_concentration(&masses, eps)?));
        }
        out.write("mass_concentration.csv", |w| {
            writeln!(w, "eps,fraction")?;
            for (e, f) in &concentration {
                writeln!(w, "{},{}", fmt_f64(*e), fmt_f64(*f))?;
            }
            Ok(())
        })?;
    }

    println!("analyze: {} terms, kappa_hat = {:.4} (rms residual {:.3e})", mags.len(), fit.kappa_hat, fit.residual);
    if let Some(d) = self_similarity_max_abs_diff {
        println!("max |c(3n) - c(n)| = {d:.3e}");
    }
    let summary =
        Summary { terms: mags.len(), fit, wiener, lp, self_similarity_max_abs_diff, mass_concentration: concentration };
    out.json("summary.json", &summary)?;
    Ok(())
}
