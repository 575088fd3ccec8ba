//! Text serialization of a fitted [`RodModel`].
//!
//! ```text
//! [header]
//! key = value
//! [x_grid]      one value per line
//! [t_grid]      one value per line
//! [modes]       Nx rows of `re,im` pairs, one pair per mode
//! [amplitudes]  Nt+1 rows (one per time) of `re,im` pairs, one pair per mode
//! [eigenvalues] one `re,im` per line
//! [end]
//! ```
//!
//! Every number is written with [`format_number`], so a read-back model
//! compares equal to the one written.

use std::collections::HashMap;
use std::path::Path;

use num_complex::Complex64;

use super::{FitDiagnostics, FitOptions, RodModel};
use crate::error::{Error, Result};
use crate::format::{format_number, parse_number, read_file, write_file};
use crate::linalg::CMatrix;

const MAGIC: &str = "# rod twin model v1";
const SECTIONS: [&str; 6] = ["header", "x_grid", "t_grid", "modes", "amplitudes", "eigenvalues"];

fn fmt_extended(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format_number(v)
    }
}

fn push_complex_row(out: &mut String, values: impl Iterator<Item = Complex64>) {
    let cells: Vec<String> = values
        .flat_map(|z| [format_number(z.re), format_number(z.im)])
        .collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

pub fn render_model(model: &RodModel) -> String {
    let o = &model.options;
    let d = &model.diagnostics;
    let header: Vec<(&str, String)> = vec![
        ("nx", model.nx().to_string()),
        ("n_snapshots", model.n_snapshots().to_string()),
        ("rank", model.rank().to_string()),
        ("requested_rank", o.rank.to_string()),
        ("seed", o.seed.to_string()),
        ("oversampling", o.oversampling.to_string()),
        ("power_iterations", o.power_iterations.to_string()),
        ("orthonormalize_sample", o.orthonormalize_sample.to_string()),
        ("reorthonormalize_modes", o.reorthonormalize_modes.to_string()),
        ("dx", format_number(model.dx)),
        ("dt", format_number(model.dt)),
        ("gram_deviation", fmt_extended(d.gram_deviation)),
        ("eigen_residual", fmt_extended(d.eigen_residual)),
        ("propagator_residual", fmt_extended(d.propagator_residual)),
        ("amplitude_condition", fmt_extended(d.amplitude_condition)),
        ("truncated_directions", d.truncated_directions.to_string()),
        ("dropped_modes", d.dropped_modes.to_string()),
    ];
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push_str("\n[header]\n");
    for (k, v) in header {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out.push_str("[x_grid]\n");
    for &x in &model.x_grid {
        out.push_str(&format_number(x));
        out.push('\n');
    }
    out.push_str("[t_grid]\n");
    for &t in &model.t_grid {
        out.push_str(&format_number(t));
        out.push('\n');
    }
    out.push_str("[modes]\n");
    for i in 0..model.modes.rows() {
        push_complex_row(&mut out, model.modes.row(i).into_iter());
    }
    out.push_str("[amplitudes]\n");
    for t in 0..model.amplitudes.cols() {
        push_complex_row(&mut out, model.amplitudes.col(t).iter().copied());
    }
    out.push_str("[eigenvalues]\n");
    for &z in &model.eigenvalues {
        push_complex_row(&mut out, std::iter::once(z));
    }
    out.push_str("[end]\n");
    out
}

pub fn write_model(path: &Path, model: &RodModel) -> Result<()> {
    write_file(path, render_model(model).as_bytes())
}

pub fn read_model(path: &Path) -> Result<RodModel> {
    parse_model(&read_file(path)?, path)
}

struct Section {
    line: usize,
    rows: Vec<(usize, String)>,
}

fn parse_complex_row(line: usize, text: &str, path: &Path, expected: usize) -> Result<Vec<Complex64>> {
    let cells: Vec<&str> = text.split(',').map(str::trim).collect();
    if cells.len() != 2 * expected {
        return Err(Error::parse(
            path,
            line,
            format!("expected {} numbers, found {}", 2 * expected, cells.len()),
        ));
    }
    let mut out = Vec::with_capacity(expected);
    for pair in cells.chunks(2) {
        let re = parse_number(pair[0]).ok_or_else(|| Error::parse(path, line, format!("bad number `{}`", pair[0])))?;
        let im = parse_number(pair[1]).ok_or_else(|| Error::parse(path, line, format!("bad number `{}`", pair[1])))?;
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

fn parse_real_rows(sec: &Section, path: &Path, expected: usize, name: &str) -> Result<Vec<f64>> {
    if sec.rows.len() != expected {
        return Err(Error::parse(
            path,
            sec.line,
            format!("[{name}] has {} rows, expected {expected}", sec.rows.len()),
        ));
    }
    sec.rows
        .iter()
        .map(|(line, s)| parse_number(s).ok_or_else(|| Error::parse(path, *line, format!("bad number `{s}`"))))
        .collect()
}

struct Header<'a> {
    map: HashMap<String, (usize, String)>,
    path: &'a Path,
    line: usize,
}

impl Header<'_> {
    fn raw(&self, key: &str) -> Result<(usize, &str)> {
        self.map
            .get(key)
            .map(|(l, v)| (*l, v.as_str()))
            .ok_or_else(|| Error::parse(self.path, self.line, format!("missing header key `{key}`")))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let (l, v) = self.raw(key)?;
        v.parse().map_err(|_| Error::parse(self.path, l, format!("`{key}` must be a non-negative integer, got `{v}`")))
    }

    fn u64(&self, key: &str) -> Result<u64> {
        let (l, v) = self.raw(key)?;
        v.parse().map_err(|_| Error::parse(self.path, l, format!("`{key}` must be an unsigned integer, got `{v}`")))
    }

    fn bool(&self, key: &str) -> Result<bool> {
        let (l, v) = self.raw(key)?;
        v.parse().map_err(|_| Error::parse(self.path, l, format!("`{key}` must be true or false, got `{v}`")))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let (l, v) = self.raw(key)?;
        match v {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => parse_number(v).ok_or_else(|| Error::parse(self.path, l, format!("`{key}` must be a number, got `{v}`"))),
        }
    }
}

pub fn parse_model(text: &str, path: &Path) -> Result<RodModel> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        _ => return Err(Error::parse(path, 1, format!("not a model file (expected `{MAGIC}`)"))),
    }

    let mut sections: HashMap<&str, Section> = HashMap::new();
    let mut current: Option<&str> = None;
    let mut ended = false;
    for (i, raw) in lines {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        if ended {
            return Err(Error::parse(path, line, "content after [end]"));
        }
        if let Some(name) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            if name == "end" {
                ended = true;
                continue;
            }
            let Some(&known) = SECTIONS.iter().find(|&&n| n == name) else {
                return Err(Error::parse(path, line, format!("unknown section [{name}]")));
            };
            if sections.contains_key(known) {
                return Err(Error::parse(path, line, format!("duplicate section [{name}]")));
            }
            sections.insert(known, Section { line, rows: Vec::new() });
            current = Some(known);
            continue;
        }
        let Some(name) = current else {
            return Err(Error::parse(path, line, "data before the first section"));
        };
        sections.get_mut(name).expect("section exists").rows.push((line, s.to_string()));
    }
    if !ended {
        return Err(Error::parse(path, text.lines().count().max(1), "missing [end]; file is truncated"));
    }
    for name in SECTIONS {
        if !sections.contains_key(name) {
            return Err(Error::parse(path, 1, format!("missing section [{name}]")));
        }
    }

    let hs = &sections["header"];
    let mut map = HashMap::new();
    for (line, row) in &hs.rows {
        let Some((k, v)) = row.split_once('=') else {
            return Err(Error::parse(path, *line, format!("expected `key = value`, got `{row}`")));
        };
        map.insert(k.trim().to_string(), (*line, v.trim().to_string()));
    }
    let h = Header { map, path, line: hs.line };

    let nx = h.usize("nx")?;
    let n_snap = h.usize("n_snapshots")?;
    let rank = h.usize("rank")?;
    let options = FitOptions {
        rank: h.usize("requested_rank")?,
        seed: h.u64("seed")?,
        oversampling: h.usize("oversampling")?,
        power_iterations: h.usize("power_iterations")?,
        orthonormalize_sample: h.bool("orthonormalize_sample")?,
        reorthonormalize_modes: h.bool("reorthonormalize_modes")?,
    };
    let diagnostics = FitDiagnostics {
        gram_deviation: h.f64("gram_deviation")?,
        eigen_residual: h.f64("eigen_residual")?,
        propagator_residual: h.f64("propagator_residual")?,
        amplitude_condition: h.f64("amplitude_condition")?,
        truncated_directions: h.usize("truncated_directions")?,
        dropped_modes: h.usize("dropped_modes")?,
    };
    let dx = h.f64("dx")?;
    let dt = h.f64("dt")?;
    if rank == 0 {
        return Err(Error::parse(path, h.raw("rank")?.0, "rank must be positive"));
    }

    let x_grid = parse_real_rows(&sections["x_grid"], path, nx, "x_grid")?;
    let t_grid = parse_real_rows(&sections["t_grid"], path, n_snap, "t_grid")?;

    let ms = &sections["modes"];
    if ms.rows.len() != nx {
        return Err(Error::parse(path, ms.line, format!("[modes] has {} rows, expected {nx}", ms.rows.len())));
    }
    let mut modes = CMatrix::zeros(nx, rank);
    for (i, (line, row)) in ms.rows.iter().enumerate() {
        for (j, z) in parse_complex_row(*line, row, path, rank)?.into_iter().enumerate() {
            modes.col_mut(j)[i] = z;
        }
    }

    let asec = &sections["amplitudes"];
    if asec.rows.len() != n_snap {
        return Err(Error::parse(
            path,
            asec.line,
            format!("[amplitudes] has {} rows, expected {n_snap}", asec.rows.len()),
        ));
    }
    let mut amplitudes = CMatrix::zeros(rank, n_snap);
    for (t, (line, row)) in asec.rows.iter().enumerate() {
        amplitudes
            .col_mut(t)
            .copy_from_slice(&parse_complex_row(*line, row, path, rank)?);
    }

    let es = &sections["eigenvalues"];
    if es.rows.len() != rank {
        return Err(Error::parse(path, es.line, format!("[eigenvalues] has {} rows, expected {rank}", es.rows.len())));
    }
    let mut eigenvalues = Vec::with_capacity(rank);
    for (line, row) in &es.rows {
        eigenvalues.push(parse_complex_row(*line, row, path, 1)?[0]);
    }

    Ok(RodModel {
        modes,
        amplitudes,
        eigenvalues,
        options,
        x_grid,
        t_grid,
        dx,
        dt,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::rod::fit;
    use crate::snapshot::SnapshotMatrix;

    fn small_model() -> RodModel {
        let v = Matrix::from_fn(7, 9, |i, j| ((i + 1) as f64 * 0.4 - j as f64 * 0.1).sin());
        let data = SnapshotMatrix::from_uniform(v, 0.25, 0.1).unwrap();
        fit(&data, 3, 11).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let model = small_model();
        let text = render_model(&model);
        let back = parse_model(&text, Path::new("m")).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn infinite_condition_round_trips() {
        let mut model = small_model();
        model.diagnostics.amplitude_condition = f64::INFINITY;
        let back = parse_model(&render_model(&model), Path::new("m")).unwrap();
        assert_eq!(back.diagnostics.amplitude_condition, f64::INFINITY);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let text = render_model(&small_model());
        let cut = &text[..text.len() / 2];
        let err = parse_model(cut, Path::new("m.txt")).unwrap_err();
        assert!(err.to_string().starts_with("m.txt:"), "{err}");
    }

    #[test]
    fn bad_number_reports_its_line() {
        let text = render_model(&small_model());
        let target = text.lines().position(|l| l == "[modes]").unwrap() + 2;
        let broken: Vec<String> = text
            .lines()
            .enumerate()
            .map(|(i, l)| if i + 1 == target { l.replacen('0', "z", 1) } else { l.to_string() })
            .collect();
        let err = parse_model(&broken.join("\n"), Path::new("m")).unwrap_err();
        assert!(err.to_string().starts_with(&format!("m:{target}:")), "{err}");
    }

    #[test]
    fn wrong_magic_is_rejected() {
        assert!(parse_model("[header]\n", Path::new("m")).is_err());
    }
}
