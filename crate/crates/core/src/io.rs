//! Plain-text export helpers shared by the CSV writers.
//!
//! Numbers are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` exactly. Lines end in `\n`.

use std::io::{self, Write};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn write_row<W: Write>(w: &mut W, fields: &[String]) -> io::Result<()> {
    writeln!(w, "{}", fields.join(","))
}

/// Writes `re, im, abs` rows for complex values keyed by a lattice point in
/// `(Z/side Z)^dim` (row-major order). Header columns are `<axis>` for one
/// dimension or `<axis>1,<axis>2,...` otherwise.
pub(crate) fn write_lattice_complex<W: Write>(
    w: &mut W,
    axis: &str,
    side: usize,
    dim: usize,
    values: &[num_complex::Complex64],
) -> io::Result<()> {
    let mut header = lattice_header(axis, dim);
    header.extend(["re", "im", "abs"].map(String::from));
    write_row(w, &header)?;
    for (idx, v) in values.iter().enumerate() {
        let mut row: Vec<String> = unravel(idx, side, dim).iter().map(|c| c.to_string()).collect();
        row.extend([fmt_f64(v.re), fmt_f64(v.im), fmt_f64(v.norm())]);
        write_row(w, &row)?;
    }
    Ok(())
}

pub(crate) fn write_lattice_real<W: Write>(
    w: &mut W,
    axis: &str,
    column: &str,
    side: usize,
    dim: usize,
    values: &[f64],
) -> io::Result<()> {
    let mut header = lattice_header(axis, dim);
    header.push(column.to_string());
    write_row(w, &header)?;
    for (idx, v) in values.iter().enumerate() {
        let mut row: Vec<String> = unravel(idx, side, dim).iter().map(|c| c.to_string()).collect();
        row.push(fmt_f64(*v));
        write_row(w, &row)?;
    }
    Ok(())
}

fn lattice_header(axis: &str, dim: usize) -> Vec<String> {
    if dim == 1 {
        vec![axis.to_string()]
    } else {
        (1..=dim).map(|i| format!("{axis}{i}")).collect()
    }
}

/// Row-major index to coordinates.
pub fn unravel(mut idx: usize, side: usize, dim: usize) -> Vec<usize> {
    let mut coords = vec![0; dim];
    for c in coords.iter_mut().rev() {
        *c = idx % side;
        idx /= side;
    }
    coords
}

/// Coordinates to row-major index.
pub fn ravel(coords: &[usize], side: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * side + c)
}
