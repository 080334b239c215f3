use crate::error::Result;
use crate::fields::{sample_field, EigenfunctionModel};
use crate::grid::ScalarField;
use crate::heat::{solve_hitting_field, DEFAULT_STEPS};

use super::common::{interval_survival, nodal_domains};
use super::config::RunConfig;
use super::report::{fmt_real, ExperimentReport, Table};

/// `p_{t}` over the whole grid, stitched from per-domain solves. Unlabeled cells hold 1.
pub(crate) fn global_field(model: &EigenfunctionModel, cells: usize, t: f64) -> Result<(ScalarField, Vec<f64>)> {
    let mask = nodal_domains(model, cells)?;
    let grid = *mask.grid();
    let mut values = vec![1.0; grid.len()];
    let mut minima = Vec::new();
    for label in 1..=mask.label_count() as u32 {
        let p = solve_hitting_field(&mask, label, t, DEFAULT_STEPS)?;
        let mut lo = f64::INFINITY;
        for idx in mask.region(label)?.indices() {
            values[idx] = p.values[idx];
            lo = lo.min(p.values[idx]);
        }
        minima.push(lo);
    }
    Ok((ScalarField { grid, values }, minima))
}

pub(crate) fn run(cfg: &RunConfig, name: &str, topic: &str) -> Result<ExperimentReport> {
    let models: Vec<EigenfunctionModel> = match cfg.model {
        Some(m) => vec![m],
        None => (1..=cfg.size(4, 2)).map(|m| EigenfunctionModel::torus(m, m)).collect::<Result<_>>()?,
    };
    let base = cfg.grid.unwrap_or(cfg.size(64, 32));

    let mut report = ExperimentReport::new(name, topic);
    report.report_only = true;
    report.input("models", models.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "));
    report.input("grid_per_mode", base);
    report.input("t", "1/lambda");

    let mut table = Table::new("infimum", &["lambda", "inf_p", "x", "y", "minima_spread", "center_closed_form"]);
    let mut infs = Vec::new();
    for model in &models {
        let lambda = model.eigenvalue();
        if lambda <= 0.0 {
            return Err(crate::error::invalid(format!("{model} has no eigenvalue")));
        }
        let t = 1.0 / lambda;
        let scale = match *model {
            EigenfunctionModel::TorusProduct { m, n } => m.max(n) as usize,
            _ => 1,
        };
        let (field, minima) = global_field(model, base * scale, t)?;
        let grid = field.grid;
        let (idx, inf) = field
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (k, &v)| if v < best.1 { (k, v) } else { best });
        let (i, j) = grid.coords(idx);
        let at = grid.center(i, j);
        let lo = minima.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = minima.iter().copied().fold(0.0, f64::max);
        infs.push(inf);
        report.measure(&format!("{model}.inf_p"), inf);
        report.measure(&format!("{model}.inf_x"), at[0]);
        report.measure(&format!("{model}.inf_y"), at[1]);
        report.measure(&format!("{model}.domain_minima_spread"), hi - lo);
        report.flag(&format!("{model}.inf_positive"), inf > 0.0, format!("inf p = {}", fmt_real(inf)));
        let mut center_value = f64::NAN;
        if let EigenfunctionModel::TorusProduct { m, n } = *model {
            // Domains are rectangles; the minimum sits at their centers.
            let (a, b) = (0.5 / m as f64, 0.5 / n as f64);
            center_value = 1.0 - interval_survival(0.5 * a, t, a) * interval_survival(0.5 * b, t, b);
            report.reference(&format!("{model}.center_closed_form"), center_value);
            let rel = (inf / center_value - 1.0).abs();
            report.gate(
                &format!("{model}.inf_matches_center_value"),
                rel <= 0.02,
                format!("{} vs {} (relative {rel:.3e}, tolerance 0.02)", fmt_real(inf), fmt_real(center_value)),
            );
            let off = |x: f64, side: f64| {
                let r = (x / side - 0.5).rem_euclid(1.0);
                r.min(1.0 - r) * side
            };
            let dist = off(at[0], a).hypot(off(at[1], b));
            report.gate(
                &format!("{model}.inf_at_domain_center"),
                dist <= grid.h,
                format!("distance {dist:.3e} from the nearest domain center (h = {:.3e})", grid.h),
            );
            report.gate(
                &format!("{model}.domain_minima_equal"),
                hi - lo <= 1e-8,
                format!("{} domain minima spread {:.3e}", minima.len(), hi - lo),
            );
        }
        table.push(vec![lambda, inf, at[0], at[1], hi - lo, center_value]);
        if cfg.emit_fields && report.fields.is_empty() {
            report.fields.push(("p_t".into(), field));
            report.fields.push(("u".into(), sample_field(model, grid)));
        }
    }
    report.tables.push(table);
    if infs.len() > 1 {
        let lo = infs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = infs.iter().copied().fold(0.0, f64::max);
        report.flag("inf_stable_across_modes", hi <= 2.0 * lo, format!("inf p ranges over [{lo:.4}, {hi:.4}]"));
    }
    Ok(report)
}
