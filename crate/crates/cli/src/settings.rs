//! Flag and config-file merging. Flags win over file values; file values win
//! over built-in defaults.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rod_core::burgers::BurgersConfig;
use rod_core::format::{parse_key_values, parse_number};
use rod_core::metrics::CorrelationVariant;
use rod_core::rank_select::DEFAULT_TOLERANCE;

use crate::UsageError;

const KNOWN_KEYS: [&str; 16] = [
    "input",
    "output",
    "model",
    "rank",
    "seed",
    "max_rank",
    "tol",
    "nu",
    "quad_order",
    "grid_points",
    "dt",
    "t_final",
    "length",
    "oversampling",
    "reorthonormalize",
    "correlation_variant",
];

/// Values read from `--config`, keyed by flag name with `-` replaced by `_`.
#[derive(Default)]
pub struct ConfigFile {
    path: PathBuf,
    values: HashMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, UsageError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("--config: cannot read {}: {e}", path.display())))?;
        let pairs = parse_key_values(&text, path).map_err(|e| UsageError(format!("--config: {e}")))?;
        let mut values = HashMap::new();
        for (line, key, value) in pairs {
            let key = key.replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(UsageError(format!(
                    "--config: {}:{line}: unknown key `{key}`",
                    path.display()
                )));
            }
            values.insert(key, (line, value));
        }
        Ok(ConfigFile {
            path: path.to_path_buf(),
            values,
        })
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.values.get(key)
    }

    fn parsed<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>, UsageError> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => parse(v).map(Some).ok_or_else(|| {
                UsageError(format!(
                    "--{}: {}:{line}: invalid value `{v}`",
                    key.replace('_', "-"),
                    self.path.display()
                ))
            }),
        }
    }

    pub fn float(&self, key: &str) -> Result<Option<f64>, UsageError> {
        self.parsed(key, parse_number)
    }

    pub fn int<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, UsageError> {
        self.parsed(key, |v| v.parse().ok())
    }

    pub fn flag(&self, key: &str) -> Result<Option<bool>, UsageError> {
        self.parsed(key, |v| v.parse().ok())
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(|(_, v)| {
            let p = PathBuf::from(v);
            match self.path.parent() {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p,
            }
        })
    }

    pub fn variant(&self) -> Result<Option<CorrelationVariant>, UsageError> {
        self.parsed("correlation_variant", |v| v.parse().ok())
    }
}

pub fn required_path(flag: Option<PathBuf>, file: &ConfigFile, key: &str) -> Result<PathBuf, UsageError> {
    flag.or_else(|| file.path(key))
        .ok_or_else(|| UsageError(format!("--{} is required", key.replace('_', "-"))))
}

pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn positive(name: &str, v: f64) -> Result<f64, UsageError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(UsageError(format!("--{name}: must be a positive number, got {v}")))
    }
}

pub struct BurgersFlags {
    pub nu: Option<f64>,
    pub quad_order: Option<usize>,
    pub grid_points: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
}

pub fn burgers_config(flags: &BurgersFlags, file: &ConfigFile) -> Result<BurgersConfig, UsageError> {
    let d = BurgersConfig::default();
    let cfg = BurgersConfig {
        length: positive("length", pick(None, file.float("length")?, d.length))?,
        final_time: positive("t-final", pick(flags.t_final, file.float("t_final")?, d.final_time))?,
        nu: positive("nu", pick(flags.nu, file.float("nu")?, d.nu))?,
        grid_points: pick(flags.grid_points, file.int("grid_points")?, d.grid_points),
        dt: positive("dt", pick(flags.dt, file.float("dt")?, d.dt))?,
        quad_order: pick(flags.quad_order, file.int("quad_order")?, d.quad_order),
    };
    if cfg.grid_points < 2 {
        return Err(UsageError(format!("--grid-points: need at least 2, got {}", cfg.grid_points)));
    }
    if cfg.quad_order == 0 || cfg.quad_order > rod_core::burgers::MAX_QUAD_ORDER {
        return Err(UsageError(format!(
            "--quad-order: must be in 1..={}, got {}",
            rod_core::burgers::MAX_QUAD_ORDER,
            cfg.quad_order
        )));
    }
    cfg.time_steps()
        .map_err(|_| UsageError(format!("--t-final: {} is not a positive multiple of --dt {}", cfg.final_time, cfg.dt)))?;
    Ok(cfg)
}

pub fn tolerance(flag: Option<f64>, file: &ConfigFile) -> Result<f64, UsageError> {
    positive("tol", pick(flag, file.float("tol")?, DEFAULT_TOLERANCE))
}
