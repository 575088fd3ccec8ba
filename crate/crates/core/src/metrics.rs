//! Quality functionals comparing a twin reconstruction with the exact field.
//!
//! Errors and correlations are time averages over `t_1 … t_Nt`; the initial
//! column is excluded. Column norms are plain Euclidean norms unless the
//! name says `weighted`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::empirical::{compare_projections, FourierModes};
use crate::error::{Error, Result};
use crate::format::{format_number, parse_key_values, parse_number};
use crate::rod::{reconstruct, RodModel};
use crate::snapshot::SnapshotMatrix;

/// Arithmetic mean of equally spaced samples.
pub fn time_average(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("time average of an empty sequence"));
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

fn check_pair(exact: &SnapshotMatrix, twin: &SnapshotMatrix) -> Result<()> {
    if exact.values().shape() != twin.values().shape() {
        return Err(Error::shape(format!(
            "exact is {:?}, twin is {:?}",
            exact.values().shape(),
            twin.values().shape()
        )));
    }
    if !exact.same_grid(twin) {
        return Err(Error::shape("exact and twin are sampled on different grids"));
    }
    if exact.n_snapshots() < 2 {
        return Err(Error::invalid("metrics need at least one snapshot after t_0"));
    }
    Ok(())
}

fn column_errors(exact: &SnapshotMatrix, twin: &SnapshotMatrix) -> Vec<f64> {
    (1..exact.n_snapshots())
        .map(|t| {
            exact
                .column(t)
                .iter()
                .zip(twin.column(t))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// `(1/Nt)·Σ_{i≥1} ‖u(·,t_i) − u_twin(·,t_i)‖₂`.
pub fn absolute_error(exact: &SnapshotMatrix, twin: &SnapshotMatrix) -> Result<f64> {
    check_pair(exact, twin)?;
    time_average(&column_errors(exact, twin))
}

/// Same average with the `L²(D)` column norm `√dx·‖·‖₂`.
pub fn absolute_error_weighted(exact: &SnapshotMatrix, twin: &SnapshotMatrix) -> Result<f64> {
    Ok(absolute_error(exact, twin)? * exact.dx().sqrt())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorrelationVariant {
    /// `Σ(u_i v_i)² / (√Σu_i⁴ · √Σv_i⁴)`.
    #[default]
    Paper,
    /// Squared cosine `(Σu_i v_i)² / (Σu_i² · Σv_i²)`.
    Cosine,
}

impl fmt::Display for CorrelationVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationVariant::Paper => "paper",
            CorrelationVariant::Cosine => "cosine",
        })
    }
}

impl FromStr for CorrelationVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(CorrelationVariant::Paper),
            "cosine" => Ok(CorrelationVariant::Cosine),
            _ => Err(Error::invalid(format!("unknown correlation variant `{s}` (paper, cosine)"))),
        }
    }
}

fn column_correlation(u: &[f64], v: &[f64], variant: CorrelationVariant) -> (f64, f64, f64) {
    match variant {
        CorrelationVariant::Paper => {
            let num: f64 = u.iter().zip(v).map(|(a, b)| (a * b) * (a * b)).sum();
            let uu = u.iter().map(|a| a.powi(4)).sum::<f64>().sqrt();
            let vv = v.iter().map(|b| b.powi(4)).sum::<f64>().sqrt();
            (num, uu, vv)
        }
        CorrelationVariant::Cosine => {
            let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
            let uu: f64 = u.iter().map(|a| a * a).sum();
            let vv: f64 = v.iter().map(|b| b * b).sum();
            (dot * dot, uu, vv)
        }
    }
}

pub fn correlation(exact: &SnapshotMatrix, twin: &SnapshotMatrix) -> Result<f64> {
    correlation_with(exact, twin, CorrelationVariant::Paper)
}

/// Time average over `t_1 … t_Nt` of the per-column correlation ratio.
pub fn correlation_with(exact: &SnapshotMatrix, twin: &SnapshotMatrix, variant: CorrelationVariant) -> Result<f64> {
    check_pair(exact, twin)?;
    let mut ratios = Vec::with_capacity(exact.nt());
    for t in 1..exact.n_snapshots() {
        let (num, uu, vv) = column_correlation(exact.column(t), twin.column(t), variant);
        if uu == 0.0 || vv == 0.0 {
            return Err(Error::ZeroColumn { index: t });
        }
        ratios.push(num / (uu * vv));
    }
    time_average(&ratios)
}

/// Summary of a fitted twin against its training data.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    pub rank: usize,
    pub seed: u64,
    pub absolute_error: f64,
    pub absolute_error_weighted: f64,
    pub correlation: f64,
    pub correlation_variant: CorrelationVariant,
    pub rod_projection_norm: f64,
    pub fourier_projection_norm: f64,
    pub gram_deviation: f64,
}

const REPORT_KEYS: [&str; 9] = [
    "rank",
    "seed",
    "absolute_error",
    "absolute_error_weighted",
    "correlation",
    "correlation_variant",
    "rod_projection_norm",
    "fourier_projection_norm",
    "gram_deviation",
];

pub fn quality_report(
    exact: &SnapshotMatrix,
    model: &RodModel,
    fourier: &FourierModes,
    variant: CorrelationVariant,
) -> Result<QualityReport> {
    let twin = reconstruct(model)?;
    let cmp = compare_projections(model, fourier, exact)?;
    Ok(QualityReport {
        rank: model.rank(),
        seed: model.seed(),
        absolute_error: absolute_error(exact, &twin)?,
        absolute_error_weighted: absolute_error_weighted(exact, &twin)?,
        correlation: correlation_with(exact, &twin, variant)?,
        correlation_variant: variant,
        rod_projection_norm: cmp.rho_rod,
        fourier_projection_norm: cmp.rho_fourier,
        gram_deviation: model.diagnostics.gram_deviation,
    })
}

impl QualityReport {
    fn values(&self) -> [String; 9] {
        [
            self.rank.to_string(),
            self.seed.to_string(),
            format_number(self.absolute_error),
            format_number(self.absolute_error_weighted),
            format_number(self.correlation),
            self.correlation_variant.to_string(),
            format_number(self.rod_projection_norm),
            format_number(self.fourier_projection_norm),
            format_number(self.gram_deviation),
        ]
    }

    pub fn to_key_values(&self) -> String {
        REPORT_KEYS
            .iter()
            .zip(self.values())
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn csv_header() -> String {
        REPORT_KEYS.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        self.values().join(",")
    }

    pub fn from_key_values(text: &str, path: &Path) -> Result<Self> {
        let pairs = parse_key_values(text, path)?;
        let lookup = |key: &str| -> Result<(usize, &str)> {
            pairs
                .iter()
                .find(|(_, k, _)| k == key)
                .map(|(l, _, v)| (*l, v.as_str()))
                .ok_or_else(|| Error::parse(path, 1, format!("missing key `{key}`")))
        };
        let num = |key: &str| -> Result<f64> {
            let (l, v) = lookup(key)?;
            parse_number(v).ok_or_else(|| Error::parse(path, l, format!("`{key}`: bad number `{v}`")))
        };
        let int = |key: &str| -> Result<u64> {
            let (l, v) = lookup(key)?;
            v.parse().map_err(|_| Error::parse(path, l, format!("`{key}`: bad integer `{v}`")))
        };
        let (vl, vv) = lookup("correlation_variant")?;
        Ok(QualityReport {
            rank: int("rank")? as usize,
            seed: int("seed")?,
            absolute_error: num("absolute_error")?,
            absolute_error_weighted: num("absolute_error_weighted")?,
            correlation: num("correlation")?,
            correlation_variant: vv.parse().map_err(|e: Error| Error::parse(path, vl, e.to_string()))?,
            rod_projection_norm: num("rod_projection_norm")?,
            fourier_projection_norm: num("fourier_projection_norm")?,
            gram_deviation: num("gram_deviation")?,
        })
    }
}
