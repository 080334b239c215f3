use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::fields::{sample_field, EigenfunctionModel};
use crate::grid::GridSpec;
use crate::heat::hitting_fields;
use crate::nodal::{label_nodal_domains, DomainMask};

use super::common::{interval_mean_survival, walled};
use super::config::{RunConfig, TimeGrid};
use super::report::{fmt_real, ExperimentReport, Table};

const STEPS_PER_INTERVAL: usize = 20;

/// The built-in family: name, mask, label.
fn family(n: usize) -> Result<Vec<(&'static str, DomainMask, u32)>> {
    let unit = walled(1.0, 1.0, n)?;
    let half = n / 2;
    let tooth = (n / 8).max(1);
    let torus = EigenfunctionModel::torus(1, 1)?;
    Ok(vec![
        ("square", DomainMask::from_cells(unit, |_, _| true), 1),
        ("rectangle", DomainMask::from_cells(unit, |_, j| j < half), 1),
        ("ell", DomainMask::from_cells(unit, |i, j| i < half || j < half), 1),
        ("slit", DomainMask::from_cells(unit, |i, j| !(i == half && j < half)), 1),
        ("comb", DomainMask::from_cells(unit, |i, j| !(i % tooth == 0 && i > 0 && j >= n / 4)), 1),
        ("torus_domain", label_nodal_domains(&sample_field(&torus, GridSpec::unit_torus(n))), 1),
    ])
}

pub(crate) fn run(cfg: &RunConfig, name: &str, topic: &str) -> Result<ExperimentReport> {
    let n = cfg.grid.unwrap_or(256);
    let times = cfg.times.unwrap_or(TimeGrid { start: 1e-4, end: 1e-2, count: cfg.size(9, 5) });
    let t = times.values();
    let half_space = 2.0 / PI.sqrt();
    let ceiling = 1.2 * half_space;

    let mut report = ExperimentReport::new(name, topic);
    report.report_only = true;
    report.input("grid", n);
    report.input("times", format!("{}:{}:{}", times.start, times.end, times.count));
    report.reference("half_space_ratio", half_space);
    report.reference("ratio_ceiling", ceiling);

    let mut table = Table::new("ratios", &["domain", "t", "content", "boundary_length", "ratio"]);
    let mut running_max = 0.0_f64;
    let mut sweep_max = 0.0_f64;
    let mut jumps = Vec::new();
    for (k, (dname, mask, label)) in family(n)?.into_iter().enumerate() {
        let region = mask.region(label)?;
        let length = region.boundary_length();
        if !(length > 0.0) {
            return Err(invalid(format!("domain {dname} has no boundary")));
        }
        let fields = hitting_fields(&mask, label, &t, STEPS_PER_INTERVAL)?;
        let ratios: Vec<f64> = fields.iter().zip(&t).map(|(f, ti)| f.content / (length * ti.sqrt())).collect();
        for ((f, ti), r) in fields.iter().zip(&t).zip(&ratios) {
            table.push(vec![k as f64, *ti, f.content, length, *r]);
            if running_max > 0.0 && *r > 1.05 * running_max {
                jumps.push(format!("{dname} at t = {ti:.3e}: {r:.4} vs running max {running_max:.4}"));
            }
            running_max = running_max.max(*r);
            sweep_max = sweep_max.max(*r);
        }
        report.measure(&format!("{dname}.boundary_length"), length);
        report.measure(&format!("{dname}.ratio_max"), ratios.iter().copied().fold(0.0, f64::max));
        // Drift over the smallest decade of times.
        let t10 = t.iter().position(|&x| x >= 10.0 * t[0] * (1.0 - 1e-9));
        if let Some(d) = t10 {
            let drift = (ratios[d] / ratios[0] - 1.0).abs();
            report.measure(&format!("{dname}.first_decade_drift"), drift);
            report.flag(&format!("{dname}.curve_flattens"), drift <= 0.05, format!("drift {drift:.4} over [{:.1e}, {:.1e}]", t[0], t[d]));
        }
        if dname == "square" {
            let exact = 1.0 - interval_mean_survival(t[0], 1.0).powi(2);
            report.reference("square.content_exact_smallest_t", exact);
            report.measure("square.content_smallest_t", fields[0].content);
            let rel = (ratios[0] / half_space - 1.0).abs();
            report.gate(
                "square_small_time_ratio",
                rel <= 0.03,
                format!("{} vs 2/√π (relative {rel:.3e}, tolerance 0.03)", fmt_real(ratios[0])),
            );
        }
        if dname == "torus_domain" {
            let lambda = 8.0 * PI * PI;
            let at = |ti: f64| -> Result<f64> {
                Ok(hitting_fields(&mask, label, &[ti], STEPS_PER_INTERVAL)?[0].content / (length * ti.sqrt()))
            };
            let (early, late) = (at(1e-4)?, at(1.0 / lambda)?);
            report.measure("torus_domain.ratio_t_1e-4", early);
            report.measure("torus_domain.ratio_t_wavelength", late);
            report.flag(
                "torus_domain_comparable_up_to_wavelength_time",
                early.max(late) <= 2.0 * early.min(late),
                format!("{early:.4} at t = 1e-4, {late:.4} at t = 1/λ"),
            );
        }
    }
    report.tables.push(table);
    report.measure("ratio_max", sweep_max);
    report.flag("ratio_below_ceiling", sweep_max <= ceiling, format!("max ratio {sweep_max:.4} vs 1.2·2/√π = {ceiling:.4}"));
    report.flag(
        "no_jumps_above_running_max",
        jumps.is_empty(),
        if jumps.is_empty() { "none".to_string() } else { jumps.join("; ") },
    );
    Ok(report)
}
