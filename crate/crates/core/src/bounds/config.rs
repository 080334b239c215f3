//! Run configuration shared by every experiment.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::fields::EigenfunctionModel;
use crate::stochastic::{PathEnsembleConfig, DEFAULT_SEED};

/// Log-spaced times `a..b` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::Config(format!("times `{s}` must be start:end:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let end: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        if !(start > 0.0 && end >= start && count >= 1) {
            return Err(Error::Config(format!("times `{s}` need 0 < start ≤ end and count ≥ 1")));
        }
        Ok(Self { start, end, count })
    }

    pub fn values(&self) -> Vec<f64> {
        crate::heat::log_times(self.start, self.end, self.count)
    }
}

/// Everything an experiment may read. Unset options fall back to per-experiment defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: String,
    pub model: Option<EigenfunctionModel>,
    /// Cells per unit length.
    pub grid: Option<usize>,
    pub times: Option<TimeGrid>,
    pub paths: Option<usize>,
    pub dt: Option<f64>,
    pub seed: u64,
    pub bridge: bool,
    pub out: PathBuf,
    pub emit_fields: bool,
    pub quick: bool,
    /// Zero-based index into the nodal domains in raster order.
    pub domain: Option<usize>,
    pub alpha: Option<f64>,
    pub r: Option<f64>,
    pub c: Option<f64>,
    pub k: Option<u32>,
    pub t: Option<f64>,
    pub lambda: Option<f64>,
    pub squares: Option<usize>,
    /// Additional experiment-specific settings.
    pub extra: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: String::new(),
            model: None,
            grid: None,
            times: None,
            paths: None,
            dt: None,
            seed: DEFAULT_SEED,
            bridge: true,
            out: PathBuf::from("nodal-lab-out"),
            emit_fields: false,
            quick: false,
            domain: None,
            alpha: None,
            r: None,
            c: None,
            k: None,
            t: None,
            lambda: None,
            squares: None,
            extra: BTreeMap::new(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("`{key}` has invalid value `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("`{key}` expects a boolean, got `{value}`"))),
    }
}

impl RunConfig {
    /// Sets one option from its flag name (without dashes, `-` or `_` separators).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        match key.as_str() {
            "experiment" => self.experiment = value.trim().to_string(),
            "model" => self.model = Some(EigenfunctionModel::parse(value)?),
            "grid" => self.grid = Some(parse_num(&key, value)?),
            "times" => self.times = Some(TimeGrid::parse(value)?),
            "paths" => self.paths = Some(parse_num(&key, value)?),
            "dt" => self.dt = Some(parse_num(&key, value)?),
            "seed" => self.seed = parse_num(&key, value)?,
            "bridge" => self.bridge = parse_bool(&key, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            "emit_fields" => self.emit_fields = parse_bool(&key, value)?,
            "quick" => self.quick = parse_bool(&key, value)?,
            "domain" => self.domain = Some(parse_num(&key, value)?),
            "alpha" => self.alpha = Some(parse_num(&key, value)?),
            "r" => self.r = Some(parse_num(&key, value)?),
            "c" => self.c = Some(parse_num(&key, value)?),
            "k" => self.k = Some(parse_num(&key, value)?),
            "t" => self.t = Some(parse_num(&key, value)?),
            "lambda" => self.lambda = Some(parse_num(&key, value)?),
            "squares" => self.squares = Some(parse_num(&key, value)?),
            _ => {
                self.extra.insert(key, value.trim().to_string());
            }
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got `{raw}`", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Path ensemble settings with the given default path count.
    pub fn ensemble(&self, default_paths: usize) -> PathEnsembleConfig {
        PathEnsembleConfig {
            n_paths: self.paths.unwrap_or(default_paths),
            dt: self.dt,
            seed: self.seed,
            bridge_correction: self.bridge,
        }
    }

    /// `full` normally, `quick` in quick mode.
    pub fn size<T>(&self, full: T, quick: T) -> T {
        if self.quick {
            quick
        } else {
            full
        }
    }

    pub fn extra_f64(&self, key: &str) -> Result<Option<f64>> {
        self.extra.get(key).map(|v| parse_num(key, v)).transpose()
    }

    pub fn extra_usize(&self, key: &str) -> Result<Option<usize>> {
        self.extra.get(key).map(|v| parse_num(key, v)).transpose()
    }
}
