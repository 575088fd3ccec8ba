//! Rank selection by exhaustive sweep.
//!
//! Each candidate rank is scored on two objectives, `j1` (absolute error)
//! and `j2` (negated correlation), and on the rank itself as a complexity
//! cost. A candidate is dominated when another one is no worse on all three
//! and strictly better on at least one. Without the rank term the largest
//! rank, which is the most accurate, dominates every other candidate.

use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::{format_number, write_file};
use crate::metrics::{absolute_error, correlation};
use crate::rod::{fit_with, reconstruct, FitOptions, RodModel};
use crate::snapshot::SnapshotMatrix;

/// Error tolerance used by [`select_rank`] unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq)]
pub struct ParetoPoint {
    pub rank: usize,
    pub j1: f64,
    pub j2: f64,
    pub dominated: bool,
    /// Set when fitting or scoring this rank failed; such points count as dominated.
    pub error: Option<String>,
}

impl ParetoPoint {
    fn failed(&self) -> bool {
        self.error.is_some()
    }

    /// Whether `self` dominates `other`.
    pub fn dominates(&self, other: &ParetoPoint) -> bool {
        if self.failed() {
            return false;
        }
        if other.failed() {
            return true;
        }
        let no_worse = self.rank <= other.rank && self.j1 <= other.j1 && self.j2 <= other.j2;
        let better = self.rank < other.rank || self.j1 < other.j1 || self.j2 < other.j2;
        no_worse && better
    }
}

/// `(j1, j2)`: absolute error and negated correlation of the reconstruction.
pub fn objectives(data: &SnapshotMatrix, model: &RodModel) -> Result<(f64, f64)> {
    let twin = reconstruct(model)?;
    Ok((absolute_error(data, &twin)?, -correlation(data, &twin)?))
}

/// Recompute every dominance flag by pairwise comparison.
pub fn mark_dominated(points: &mut [ParetoPoint]) {
    let flags: Vec<bool> = points
        .iter()
        .map(|p| p.failed() || points.iter().any(|q| q.dominates(p)))
        .collect();
    for (p, d) in points.iter_mut().zip(flags) {
        p.dominated = d;
    }
}

fn score(data: &SnapshotMatrix, opts: &FitOptions) -> ParetoPoint {
    let result = fit_with(data, opts).and_then(|m| objectives(data, &m));
    match result {
        Ok((j1, j2)) => ParetoPoint {
            rank: opts.rank,
            j1,
            j2,
            dominated: false,
            error: None,
        },
        Err(e) => {
            log::warn!("rank {}: {e}", opts.rank);
            ParetoPoint {
                rank: opts.rank,
                j1: f64::NAN,
                j2: f64::NAN,
                dominated: true,
                error: Some(e.to_string()),
            }
        }
    }
}

pub fn pareto_sweep(data: &SnapshotMatrix, rank_max: usize, seed: u64) -> Result<Vec<ParetoPoint>> {
    pareto_sweep_with(data, rank_max, &FitOptions::new(1, seed))
}

/// Fit ranks `1..=rank_max` with `base` (its `rank` field is ignored).
/// Ranks are fitted in parallel; the result is sorted by rank.
pub fn pareto_sweep_with(data: &SnapshotMatrix, rank_max: usize, base: &FitOptions) -> Result<Vec<ParetoPoint>> {
    let bound = data.nx().min(data.nt());
    if rank_max == 0 || rank_max > bound {
        return Err(Error::invalid(format!("rank_max {rank_max} outside 1..={bound}")));
    }
    let mut points: Vec<ParetoPoint> = (1..=rank_max)
        .into_par_iter()
        .map(|rank| score(data, &FitOptions { rank, ..*base }))
        .collect();
    points.sort_by_key(|p| p.rank);
    mark_dominated(&mut points);
    Ok(points)
}

/// Smallest nondominated rank with `j1 ≤ tol`; failing that, the
/// nondominated point with the smallest `j1`.
pub fn select_rank(points: &[ParetoPoint], tol: f64) -> Result<usize> {
    let front: Vec<&ParetoPoint> = points.iter().filter(|p| !p.dominated && !p.failed()).collect();
    if front.is_empty() {
        return Err(Error::invalid("no nondominated rank to select from"));
    }
    if let Some(p) = front.iter().filter(|p| p.j1 <= tol).min_by_key(|p| p.rank) {
        return Ok(p.rank);
    }
    let best = front
        .iter()
        .min_by(|a, b| a.j1.total_cmp(&b.j1).then(a.rank.cmp(&b.rank)))
        .expect("front is nonempty");
    Ok(best.rank)
}

pub fn sweep_csv(points: &[ParetoPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "j1", "j2", "dominated", "error"]).expect("in-memory write");
    for p in points {
        let num = |v: f64| if v.is_nan() { String::new() } else { format_number(v) };
        w.write_record([
            p.rank.to_string(),
            num(p.j1),
            num(p.j2),
            p.dominated.to_string(),
            p.error.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

pub fn write_sweep_csv(path: &Path, points: &[ParetoPoint]) -> Result<()> {
    write_file(path, sweep_csv(points).as_bytes())
}
