//! Flags. A config file is applied first; flags given on the command line override it.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use nodal_heat::bounds::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "nodal-lab", about = "Heat flow and Brownian motion experiments on nodal domains")]
pub struct Cli {
    /// Experiment name, or `suite` for all of them.
    pub experiment: String,
    /// Flat `key = value` file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Eigenfunction, e.g. `torus:1,1`, `rect:1,1,1,1`, `disk:0,1`, `cone:2`.
    #[arg(long)]
    pub model: Option<String>,
    /// Cells per unit length.
    #[arg(long)]
    pub grid: Option<String>,
    /// Log-spaced times `start:end:count`.
    #[arg(long)]
    pub times: Option<String>,
    #[arg(long)]
    pub paths: Option<String>,
    #[arg(long)]
    pub dt: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Brownian-bridge killing between steps (`true` or `false`).
    #[arg(long)]
    pub bridge: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// Also write matrix CSVs of the computed fields.
    #[arg(long)]
    pub emit_fields: bool,
    /// Reduced sizes.
    #[arg(long)]
    pub quick: bool,
    /// Zero-based nodal domain index.
    #[arg(long)]
    pub domain: Option<String>,
    /// Wedge opening angle.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Wedge stopping radius.
    #[arg(long)]
    pub r: Option<String>,
    /// Tube width in wavelengths.
    #[arg(long)]
    pub c: Option<String>,
    /// Vanishing order.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    /// Number of squares covering the corridor.
    #[arg(long)]
    pub squares: Option<String>,
    /// Corridor exponent: the half-width is λ^{-exponent}.
    #[arg(long)]
    pub exponent: Option<String>,
    /// Extra `key=value` settings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Cli {
    pub fn try_parse_from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        Self::try_parse_from(args)
    }

    pub fn into_config(self) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            cfg.apply_file_text(&text).map_err(|e| e.to_string())?;
        }
        cfg.experiment = self.experiment.clone();
        let pairs = [
            ("model", &self.model),
            ("grid", &self.grid),
            ("times", &self.times),
            ("paths", &self.paths),
            ("dt", &self.dt),
            ("seed", &self.seed),
            ("bridge", &self.bridge),
            ("out", &self.out),
            ("domain", &self.domain),
            ("alpha", &self.alpha),
            ("r", &self.r),
            ("c", &self.c),
            ("k", &self.k),
            ("t", &self.t),
            ("lambda", &self.lambda),
            ("squares", &self.squares),
            ("exponent", &self.exponent),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v).map_err(|e| e.to_string())?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
            cfg.set(k, v).map_err(|e| e.to_string())?;
        }
        cfg.emit_fields |= self.emit_fields;
        cfg.quick |= self.quick;
        Ok(cfg)
    }
}
