//! Plain-text formats shared by the library and the command-line tool.
//!
//! Numbers are written with the shortest representation that parses back to
//! the identical `f64` (never more than 17 significant digits). Magnitudes in
//! `[1e-3, 1e4)` use positional notation, everything else scientific.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::snapshot::SnapshotMatrix;

pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".to_string()
    } else if (1e-3..1e4).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn parse_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parse `key = value` lines. Blank lines and `#` comments are skipped.
/// Returns `(line_number, key, value)` triples in file order.
pub fn parse_key_values(text: &str, path: &Path) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::parse(path, i + 1, format!("expected `key = value`, got `{line}`")));
        };
        let key = k.trim();
        if key.is_empty() {
            return Err(Error::parse(path, i + 1, "empty key"));
        }
        out.push((i + 1, key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn write_key_values(out: &mut impl Write, pairs: &[(&str, String)]) -> std::io::Result<()> {
    for (k, v) in pairs {
        writeln!(out, "{k} = {v}")?;
    }
    Ok(())
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Render a snapshot matrix as CSV: a header `x,t_0,t_1,…` carrying the
/// sample times, then one row per grid point with its coordinate first.
pub fn snapshot_csv(data: &SnapshotMatrix) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec!["x".to_string()];
    header.extend(data.t_grid().iter().map(|&t| format_number(t)));
    w.write_record(&header).expect("in-memory write");
    let values = data.values();
    for (i, &x) in data.x_grid().iter().enumerate() {
        let mut rec = vec![format_number(x)];
        rec.extend((0..values.cols()).map(|j| format_number(values[(i, j)])));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn write_snapshot_csv(path: &Path, data: &SnapshotMatrix) -> Result<()> {
    write_file(path, snapshot_csv(data).as_bytes())
}

pub fn read_snapshot_csv(path: &Path) -> Result<SnapshotMatrix> {
    parse_snapshot_csv(&read_file(path)?, path)
}

pub fn parse_snapshot_csv(text: &str, path: &Path) -> Result<SnapshotMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| Error::parse(path, 1, e.to_string()))?,
        None => return Err(Error::parse(path, 1, "empty snapshot file")),
    };
    if header.get(0) != Some("x") {
        return Err(Error::parse(path, 1, "header must start with `x`"));
    }
    let mut t_grid = Vec::with_capacity(header.len() - 1);
    for (j, cell) in header.iter().enumerate().skip(1) {
        let t = parse_number(cell)
            .ok_or_else(|| Error::parse(path, 1, format!("column {j}: bad time `{cell}`")))?;
        t_grid.push(t);
    }
    if t_grid.is_empty() {
        return Err(Error::parse(path, 1, "no snapshot columns"));
    }

    let mut x_grid = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); t_grid.len()];
    for (k, rec) in records.enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::parse(path, line, e.to_string()))?;
        if rec.len() != t_grid.len() + 1 {
            return Err(Error::parse(
                path,
                line,
                format!("expected {} fields, found {}", t_grid.len() + 1, rec.len()),
            ));
        }
        for (j, cell) in rec.iter().enumerate() {
            let v = parse_number(cell)
                .ok_or_else(|| Error::parse(path, line, format!("field {}: bad number `{cell}`", j + 1)))?;
            if j == 0 {
                x_grid.push(v);
            } else {
                columns[j - 1].push(v);
            }
        }
    }
    if x_grid.is_empty() {
        return Err(Error::parse(path, 2, "no data rows"));
    }
    let values = Matrix::from_columns(&columns)?;
    SnapshotMatrix::from_grids(values, x_grid, t_grid)
        .map_err(|e| Error::parse(path, 1, format!("invalid grid: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_notation_switches_at_documented_bounds() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(0.02), "0.02");
        assert_eq!(format_number(-1.5), "-1.5");
        assert_eq!(format_number(8.7264e-7), "8.7264e-7");
        assert_eq!(format_number(1e-3), "0.001");
        assert_eq!(format_number(9999.5), "9999.5");
        assert_eq!(format_number(1e4), "1e4");
        assert_eq!(format_number(-2.5e300), "-2.5e300");
    }

    #[test]
    fn numbers_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, -std::f64::consts::PI * 1e-9, 6.02214076e23, 5e-324, f64::MAX] {
            assert_eq!(parse_number(&format_number(v)), Some(v));
        }
        assert_eq!(parse_number("nan"), None);
        assert_eq!(parse_number("abc"), None);
    }

    #[test]
    fn key_values_skip_comments() {
        let kv = parse_key_values("# header\nrank = 10\n\nseed=42 # trailing\n", Path::new("c")).unwrap();
        assert_eq!(kv.len(), 2);
        assert_eq!((kv[0].0, kv[0].1.as_str(), kv[0].2.as_str()), (2, "rank", "10"));
        assert_eq!((kv[1].0, kv[1].1.as_str(), kv[1].2.as_str()), (4, "seed", "42"));
        let err = parse_key_values("rank 10", Path::new("cfg")).unwrap_err();
        assert!(err.to_string().contains("cfg:1"));
    }

    #[test]
    fn csv_parse_errors_carry_line_numbers() {
        let p = Path::new("data.csv");
        let err = parse_snapshot_csv("x,0,1\n0,1,2\n0.5,1,oops\n", p).unwrap_err();
        assert!(err.to_string().starts_with("data.csv:3:"), "{err}");
        let err = parse_snapshot_csv("x,0,1\n0,1\n", p).unwrap_err();
        assert!(err.to_string().starts_with("data.csv:2:"), "{err}");
        assert!(parse_snapshot_csv("", p).is_err());
        assert!(parse_snapshot_csv("y,0\n0,1\n", p).is_err());
    }
}
