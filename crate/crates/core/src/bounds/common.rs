//! Setup shared by the experiments.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::{sample_field, EigenfunctionModel};
use crate::grid::GridSpec;
use crate::nodal::{label_nodal_domains_within, DomainMask};

use super::config::RunConfig;
use super::report::ExperimentReport;

/// Samples `model` on its natural grid and labels its nodal domains.
pub(crate) fn nodal_domains(model: &EigenfunctionModel, cells_per_unit: usize) -> Result<DomainMask> {
    let grid = model.natural_grid(cells_per_unit)?;
    let field = sample_field(model, grid);
    let inside = |i, j| model.in_support(grid.center(i, j));
    Ok(label_nodal_domains_within(&field, inside))
}

/// The label of the zero-based `--domain` index.
pub(crate) fn label_of(mask: &DomainMask, index: usize) -> Result<u32> {
    let label = u32::try_from(index + 1).map_err(|_| Error::UnknownLabel(u32::MAX))?;
    if index >= mask.label_count() {
        return Err(Error::UnknownLabel(label));
    }
    Ok(label)
}

pub(crate) fn eigen_model(cfg: &RunConfig, default: EigenfunctionModel) -> Result<EigenfunctionModel> {
    let model = cfg.model.unwrap_or(default);
    if model.eigenvalue() <= 0.0 {
        return Err(crate::error::invalid(format!("{model} has no eigenvalue; this experiment needs an eigenfunction")));
    }
    Ok(model)
}

/// Records the shared ensemble settings.
pub(crate) fn record_ensemble(report: &mut ExperimentReport, cfg: &RunConfig, paths: usize) {
    report.input("paths", paths);
    report.input("dt", cfg.dt.map_or("t/1000".to_string(), |d| d.to_string()));
    report.input("seed", cfg.seed);
    report.input("bridge", cfg.bridge);
}

/// Probability that Brownian motion (generator `d²/dx²`) started at `x` stays in
/// `(0, l)` up to time `t`, by its sine series.
pub fn interval_survival(x: f64, t: f64, l: f64) -> f64 {
    if t <= 0.0 {
        return if x > 0.0 && x < l { 1.0 } else { 0.0 };
    }
    let mut s = 0.0;
    for k in (1..4000).step_by(2) {
        let kf = k as f64;
        let decay = (-kf * kf * PI * PI * t / (l * l)).exp();
        s += 4.0 / (kf * PI) * (kf * PI * x / l).sin() * decay;
        if decay < 1e-18 {
            break;
        }
    }
    s
}

/// Mean of [`interval_survival`] over the interval.
pub fn interval_mean_survival(t: f64, l: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in (1..4000).step_by(2) {
        let kf = k as f64;
        let decay = (-kf * kf * PI * PI * t / (l * l)).exp();
        s += 8.0 / (kf * kf * PI * PI) * decay;
        if decay < 1e-18 {
            break;
        }
    }
    s
}

/// Least squares `y ≈ a + b x`, returning `(a, b, r²)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let b = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (my - b * mx, b, r2)
}

/// A rectangle grid with walls.
pub(crate) fn walled(a: f64, b: f64, cells_per_unit: usize) -> Result<GridSpec> {
    GridSpec::rectangle(a, b, cells_per_unit)
}
