use std::f64::consts::{E, PI};

use crate::error::{invalid, Result};
use crate::fields::EigenfunctionModel;
use crate::grid::GridSpec;
use crate::stochastic::{hitting_probability_in, PathEnsembleConfig, Tube};

use super::common::{eigen_model, interval_survival, nodal_domains, record_ensemble};
use super::config::RunConfig;
use super::report::{fmt_real, ExperimentReport, Table};

/// Ratio of the standard deviation of our increments (variance `2t`) to that of a
/// process with variance `t`, inverted: densities carry an extra `1/√2`.
pub const VARIANCE_FACTOR: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A straight segment on the unit torus and the half-width of its neighbourhood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeSpec {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub half_width: f64,
}

impl TubeSpec {
    pub fn new(a: [f64; 2], b: [f64; 2], half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid(format!("tube half-width must be positive, got {half_width}")));
        }
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        if len > 1.0 + 1e-12 {
            return Err(invalid(format!("segment length {len} exceeds 1")));
        }
        Ok(Self { a, b, half_width })
    }

    pub fn midpoint(&self) -> [f64; 2] {
        [0.5 * (self.a[0] + self.b[0]), 0.5 * (self.a[1] + self.b[1])]
    }

    pub fn on_torus(&self) -> Tube {
        Tube { grid: GridSpec::unit_torus(1), a: self.a, b: self.b, half_width: self.half_width }
    }
}

/// Lower bound `1 − √(2/π)·c·κ` for leaving a tube of half-width `c λ^{-1/2}` by time
/// `1/λ`: the normal density is bounded by its maximum.
pub fn escape_lower_bound(c: f64, kappa: f64) -> f64 {
    let peak_density = 1.0 / (2.0 * PI).sqrt();
    (1.0 - 2.0 * c * kappa * peak_density).max(0.0)
}

/// The `c` at which [`escape_lower_bound`] drops to `1 − e^{-1}`, found by bisection.
pub fn tail_threshold(kappa: f64) -> f64 {
    let target = 1.0 - (-1.0f64).exp();
    let (mut lo, mut hi) = (0.0, 100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if escape_lower_bound(mid, kappa) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn parse_segment(s: &str) -> Result<([f64; 2], [f64; 2])> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| crate::error::Error::Config(format!("segment `{s}` must be x0,y0,x1,y1")))?;
    if v.len() != 4 {
        return Err(crate::error::Error::Config(format!("segment `{s}` must be x0,y0,x1,y1")));
    }
    Ok(([v[0], v[1]], [v[2], v[3]]))
}

pub(crate) fn run(cfg: &RunConfig, name: &str, topic: &str) -> Result<ExperimentReport> {
    let model = eigen_model(cfg, EigenfunctionModel::torus(1, 1)?)?;
    let lambda = model.eigenvalue();
    let t = 1.0 / lambda;
    let c = cfg.c.unwrap_or(0.4);
    let (a, b) = match cfg.extra.get("segment") {
        Some(s) => parse_segment(s)?,
        None => ([0.0, 0.25], [1.0, 0.25]),
    };
    let spec = TubeSpec::new(a, b, c / lambda.sqrt())?;
    let ens = cfg.ensemble(cfg.size(100_000, 20_000));
    let sweep_ens = PathEnsembleConfig { n_paths: (ens.n_paths / 10).max(1000), ..ens };
    let cells = cfg.grid.unwrap_or(cfg.size(128, 64));

    let mut report = ExperimentReport::new(name, topic);
    report.input("model", model);
    report.input("c", fmt_real(c));
    report.input("segment", format!("{},{},{},{}", a[0], a[1], b[0], b[1]));
    report.input("t", "1/lambda");
    report.input("grid", cells);
    record_ensemble(&mut report, cfg, ens.n_paths);
    report.measure("half_width", spec.half_width);
    if spec.half_width >= 0.5 {
        report.report_only = true;
        report.note("tube wider than the torus; results are descriptive only");
    }

    // Constants of the tail bound.
    let literal = tail_threshold(1.0);
    let adjusted = tail_threshold(VARIANCE_FACTOR);
    let closed = PI.sqrt() / (2.0f64.sqrt() * E);
    report.measure("threshold_bisection", literal);
    report.measure("threshold_variance_adjusted", adjusted);
    report.measure("variance_factor", VARIANCE_FACTOR);
    report.reference("threshold_closed_form", closed);
    report.reference("threshold_adjusted_closed_form", PI.sqrt() / E);
    report.reference("survival_bound", 1.0 - (-1.0f64).exp());
    report.gate(
        "threshold_reproduced",
        (literal - closed).abs() <= 1e-5,
        format!("{} vs √π/(√2 e) = {}", fmt_real(literal), fmt_real(closed)),
    );
    report.note("our increments have variance 2t, so the bound uses κ = 1/√2 and the threshold becomes √π/e");

    // Escape from the tube around Σ.
    let tube = spec.on_torus();
    let x0 = spec.midpoint();
    let escape = hitting_probability_in(&tube, x0, t, &ens)?;
    let bound = escape_lower_bound(c, VARIANCE_FACTOR);
    let survival_bound = 1.0 - (-1.0f64).exp();
    report.estimate("escape", escape);
    report.reference("escape_lower_bound", bound);
    report.reference("escape_strip_exact", 1.0 - interval_survival(spec.half_width, t, 2.0 * spec.half_width));
    report.gate(
        "escape_above_bound",
        escape.mean >= bound - 3.0 * escape.std_error,
        format!("{} ≥ {} − 3 se", fmt_real(escape.mean), fmt_real(bound)),
    );
    let excluded = escape.mean - 3.0 * escape.std_error > survival_bound;
    report.measure("escape_margin_in_se", (escape.mean - survival_bound) / escape.std_error.max(f64::MIN_POSITIVE));
    if c < adjusted {
        report.gate(
            "escape_exceeds_survival_bound",
            excluded,
            format!("{} − 3 se > 1 − 1/e = {}", fmt_real(escape.mean), fmt_real(survival_bound)),
        );
    } else {
        report.flag("escape_exceeds_survival_bound", excluded, "c at or above the threshold; no exclusion expected");
    }

    // Sweep over c.
    let mut table = Table::new("c_sweep", &["c", "escape", "escape_se", "lower_bound", "literal_bound", "strip_exact"]);
    let mut sweep_ok = true;
    for &ci in &[0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.5] {
        let tube_i = TubeSpec { half_width: ci / lambda.sqrt(), ..spec }.on_torus();
        let e = hitting_probability_in(&tube_i, x0, t, &sweep_ens)?;
        let lb = escape_lower_bound(ci, VARIANCE_FACTOR);
        sweep_ok &= e.mean >= lb - 3.0 * e.std_error;
        let w = tube_i.half_width;
        table.push(vec![ci, e.mean, e.std_error, lb, escape_lower_bound(ci, 1.0), 1.0 - interval_survival(w, t, 2.0 * w)]);
    }
    report.tables.push(table);
    report.gate("sweep_escape_above_bound", sweep_ok, "escape ≥ bound − 3 se for every c in the sweep");

    // Which nodal domains fit in the tube.
    let mask = nodal_domains(&model, cells)?;
    let grid = *mask.grid();
    let reach = 0.5 * grid.h * 2.0f64.sqrt();
    let mut fit_c = Vec::new();
    for label in 1..=mask.label_count() as u32 {
        let region = mask.region(label)?;
        let far = region.cells().map(|(i, j)| tube.distance_to_axis(grid.center(i, j)) + reach).fold(0.0, f64::max);
        fit_c.push(far * lambda.sqrt());
    }
    let smallest = fit_c.iter().copied().fold(f64::INFINITY, f64::min);
    let fitting = fit_c.iter().filter(|&&f| f <= c).count();
    report.measure("smallest_c_containing_a_domain", smallest);
    report.measure("domains_inside_tube", fitting as f64);
    if c < adjusted {
        report.gate(
            "no_domain_inside_thin_tube",
            fitting == 0,
            format!("{fitting} domains inside; the thinnest tube holding one has c = {smallest:.4}"),
        );
    } else {
        report.flag("domains_inside_tube", fitting == 0, format!("{fitting} domains inside; smallest c = {smallest:.4}"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_values() {
        let literal = tail_threshold(1.0);
        assert!((literal - 0.461_068_5).abs() < 1e-6, "{literal}");
        assert!((tail_threshold(VARIANCE_FACTOR) - PI.sqrt() / E).abs() < 1e-12);
        assert_eq!(escape_lower_bound(0.0, 1.0), 1.0);
        assert_eq!(escape_lower_bound(10.0, 1.0), 0.0);
    }

    #[test]
    fn bound_is_below_exact_normal_tail() {
        // P(|N(0, 2t)| ≥ c t^{1/2}) = erfc(c/2) for our increments.
        for k in 0..50 {
            let c = 0.05 * k as f64;
            assert!(crate::special::erfc(0.5 * c) >= escape_lower_bound(c, VARIANCE_FACTOR) - 1e-15);
        }
    }

    #[test]
    fn tube_spec_validation() {
        assert!(TubeSpec::new([0.0, 0.0], [1.0, 0.5], 0.1).is_err());
        assert!(TubeSpec::new([0.0, 0.0], [1.0, 0.0], 0.0).is_err());
        assert_eq!(TubeSpec::new([0.0, 0.0], [1.0, 0.0], 0.1).unwrap().midpoint(), [0.5, 0.0]);
    }
}
