//! Exact solution of the viscous Burgers equation
//! `u_t + u·u_x = ν·u_xx` on `[0, L]` with `u(x, 0) = −sin(πx)` and
//! homogeneous Dirichlet boundaries, via the Cole–Hopf transform.
//!
//! After the change of variables `y = x − z·√(4νt)` the heat-kernel integrals
//! become Gauss–Hermite integrals, so
//!
//! ```text
//! u(x, t) = Σ w_i·4ν·z_i·g(z_i) / Σ w_i·√(4νt)·g(z_i),
//! g(z)    = exp(−cos(π(x − z·√(4νt))) / (2νπ)).
//! ```

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::{format_number, parse_key_values, parse_number, read_file, write_file};
use crate::linalg::{eig_sym_tridiag, Matrix};
use crate::snapshot::SnapshotMatrix;

/// Below this time the initial condition is returned directly.
pub const T_EPS: f64 = 1e-12;
pub const MAX_QUAD_ORDER: usize = 500;

/// Gauss–Hermite rule for `∫ f(z)·e^{−z²} dz`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    /// Ascending roots of `H_n`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix of the
/// Hermite recurrence (zero diagonal, off-diagonal `√(i/2)`), weights are
/// `√π·v_0²` for the normalized eigenvectors `v`.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_QUAD_ORDER {
        return Err(Error::invalid(format!("quadrature order {n} outside 1..={MAX_QUAD_ORDER}")));
    }
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|i| (i as f64 / 2.0).sqrt()).collect();
    let (values, vectors) = eig_sym_tridiag(&diag, &off)?;
    let sqrt_pi = PI.sqrt();
    let mut nodes = values;
    let mut weights: Vec<f64> = (0..n).map(|j| sqrt_pi * vectors[(0, j)].powi(2)).collect();
    // Enforce exact mirror symmetry.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Parameters of the benchmark problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurgersConfig {
    pub length: f64,
    pub final_time: f64,
    pub nu: f64,
    pub grid_points: usize,
    pub dt: f64,
    pub quad_order: usize,
}

impl Default for BurgersConfig {
    fn default() -> Self {
        BurgersConfig {
            length: 2.0,
            final_time: 3.0,
            nu: 0.01,
            grid_points: 101,
            dt: 0.01,
            quad_order: 100,
        }
    }
}

impl BurgersConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.length) {
            return Err(Error::invalid(format!("length must be positive, got {}", self.length)));
        }
        if !positive(self.final_time) {
            return Err(Error::invalid(format!("final time must be positive, got {}", self.final_time)));
        }
        if !positive(self.nu) {
            return Err(Error::invalid(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !positive(self.dt) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.grid_points < 2 {
            return Err(Error::invalid("need at least two grid points"));
        }
        if self.quad_order == 0 || self.quad_order > MAX_QUAD_ORDER {
            return Err(Error::invalid(format!(
                "quadrature order {} outside 1..={MAX_QUAD_ORDER}",
                self.quad_order
            )));
        }
        self.time_steps()?;
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.length / (self.grid_points - 1) as f64
    }

    /// Number of steps `Nt`; `final_time` must be a whole multiple of `dt`.
    pub fn time_steps(&self) -> Result<usize> {
        let steps = (self.final_time / self.dt).round();
        if steps < 1.0 || (steps * self.dt - self.final_time).abs() > 1e-9 * self.final_time {
            return Err(Error::invalid(format!(
                "final time {} is not a positive multiple of dt {}",
                self.final_time, self.dt
            )));
        }
        Ok(steps as usize)
    }

    pub fn to_key_values(&self) -> String {
        let pairs = [
            ("length", format_number(self.length)),
            ("final_time", format_number(self.final_time)),
            ("nu", format_number(self.nu)),
            ("grid_points", self.grid_points.to_string()),
            ("dx", format_number(self.dx())),
            ("dt", format_number(self.dt)),
            ("quad_order", self.quad_order.to_string()),
        ];
        pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Parse a metadata sidecar. `dx` is derived and ignored on input.
    pub fn from_key_values(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = BurgersConfig::default();
        for (line, key, value) in parse_key_values(text, path)? {
            let bad = || Error::parse(path, line, format!("`{key}`: bad value `{value}`"));
            match key.as_str() {
                "length" => cfg.length = parse_number(&value).ok_or_else(bad)?,
                "final_time" => cfg.final_time = parse_number(&value).ok_or_else(bad)?,
                "nu" => cfg.nu = parse_number(&value).ok_or_else(bad)?,
                "dt" => cfg.dt = parse_number(&value).ok_or_else(bad)?,
                "grid_points" => cfg.grid_points = value.parse().map_err(|_| bad())?,
                "quad_order" => cfg.quad_order = value.parse().map_err(|_| bad())?,
                "dx" => {}
                _ => return Err(Error::parse(path, line, format!("unknown key `{key}`"))),
            }
        }
        cfg.validate().map_err(|e| Error::parse(path, 1, e.to_string()))?;
        Ok(cfg)
    }
}

pub fn write_metadata(path: &Path, cfg: &BurgersConfig) -> Result<()> {
    write_file(path, cfg.to_key_values().as_bytes())
}

pub fn read_metadata(path: &Path) -> Result<BurgersConfig> {
    BurgersConfig::from_key_values(&read_file(path)?, path)
}

/// Cole–Hopf potential at `t = 0`: `exp(1/(2νπ))·exp(−cos(πx)/(2νπ))`.
pub fn phi0(x: f64, nu: f64) -> f64 {
    let c = 1.0 / (2.0 * nu * PI);
    (c - (PI * x).cos() * c).exp()
}

pub fn initial_condition(x: f64) -> f64 {
    -(PI * x).sin()
}

pub fn exact_u(x: f64, t: f64, nu: f64, rule: &QuadratureRule) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::invalid(format!("time must be nonnegative, got {t}")));
    }
    if t < T_EPS {
        return Ok(initial_condition(x));
    }
    let s = (4.0 * nu * t).sqrt();
    let c = 1.0 / (2.0 * nu * PI);
    let exponents: Vec<f64> = rule
        .nodes
        .iter()
        .map(|&z| -(PI * (x - z * s)).cos() * c)
        .collect();
    let shift = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&z, &w), &e) in rule.nodes.iter().zip(&rule.weights).zip(&exponents) {
        let g = (e - shift).exp();
        num += w * z * g;
        den += w * g;
    }
    let den = den * s;
    if den < 1e-300 {
        return Err(Error::invalid(format!("vanishing denominator at x={x}, t={t}")));
    }
    Ok(4.0 * nu * num / den)
}

/// Sample the exact solution on the configured grid: column `j` is `u(·, j·dt)`.
pub fn generate_snapshots(cfg: &BurgersConfig) -> Result<SnapshotMatrix> {
    cfg.validate()?;
    let rule = gauss_hermite(cfg.quad_order)?;
    generate_with_rule(cfg, &rule)
}

pub fn generate_with_rule(cfg: &BurgersConfig, rule: &QuadratureRule) -> Result<SnapshotMatrix> {
    cfg.validate()?;
    let nx = cfg.grid_points;
    let steps = cfg.time_steps()?;
    let dx = cfg.dx();
    let columns: Vec<Vec<f64>> = (0..=steps)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 * cfg.dt;
            (0..nx).map(|i| exact_u(i as f64 * dx, t, cfg.nu, rule)).collect()
        })
        .collect::<Result<_>>()?;
    SnapshotMatrix::from_uniform(Matrix::from_columns(&columns)?, dx, cfg.dt)
}
