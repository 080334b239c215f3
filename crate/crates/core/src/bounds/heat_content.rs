use std::f64::consts::PI;

use crate::error::Result;
use crate::fields::{sample_field, EigenfunctionModel};
use crate::heat::{hitting_fields, HeatContentCurve, fit_sqrt_slope};

use super::common::{label_of, nodal_domains};
use super::config::{RunConfig, TimeGrid};
use super::report::{relative, ExperimentReport, Table};

const STEPS_PER_INTERVAL: usize = 20;

pub(crate) fn run(cfg: &RunConfig, name: &str, topic: &str) -> Result<ExperimentReport> {
    let model = cfg.model.unwrap_or(EigenfunctionModel::rectangle(1, 1, 1.0, 1.0)?);
    let cells = cfg.grid.unwrap_or(cfg.size(1024, 512));
    let times = cfg.times.unwrap_or(TimeGrid { start: 1e-5, end: 1e-4, count: 8 });
    let slope_tol = cfg.extra_f64("slope_tol")?.unwrap_or(0.03);
    let min_r2 = cfg.extra_f64("min_r2")?.unwrap_or(0.999);
    if times.count < 4 {
        return Err(crate::error::invalid(format!("slope fit needs at least 4 times, got {}", times.count)));
    }

    let mut report = ExperimentReport::new(name, topic);
    report.input("model", model);
    report.input("grid", cells);
    report.input("times", format!("{}:{}:{}", times.start, times.end, times.count));
    report.input("slope_tol", slope_tol);
    report.input("min_r2", min_r2);

    let mask = nodal_domains(&model, cells)?;
    let label = label_of(&mask, cfg.domain.unwrap_or(0))?;
    report.input("domain", label - 1);
    let t = times.values();
    let fields = hitting_fields(&mask, label, &t, STEPS_PER_INTERVAL)?;
    let contents: Vec<f64> = fields.iter().map(|f| f.content).collect();
    let region = mask.region(label)?;
    let length = region.boundary_length();
    let curve = HeatContentCurve {
        slope_fit: fit_sqrt_slope(&t, &contents),
        clip: fields.iter().map(|f| f.clip).fold(0.0, f64::max),
        times: t.clone(),
        contents,
        warnings: Vec::new(),
    };

    let mut table = Table::new("heat_content", &["t", "content", "slope_running"]);
    for ((ti, ci), si) in curve.times.iter().zip(&curve.contents).zip(curve.running_slopes()) {
        table.push(vec![*ti, *ci, si]);
    }
    report.tables.push(table);

    let expected = 2.0 / PI.sqrt() * length;
    report.measure("area", region.area());
    report.measure("boundary_length", length);
    report.measure("slope_c", curve.slope_fit.c);
    report.measure("slope_r2", curve.slope_fit.r2);
    report.measure("clip", curve.clip);
    report.reference("half_space_slope", expected);
    let (ok, detail) = relative(curve.slope_fit.c, expected, slope_tol);
    report.gate("slope_vs_boundary_length", ok, detail);
    report.gate(
        "slope_fit_r2",
        curve.slope_fit.r2 >= min_r2,
        format!("r2 = {:.6} (minimum {min_r2})", curve.slope_fit.r2),
    );
    let t_max = times.end;
    if t_max < 10.0 * times.start * (1.0 - 1e-9) {
        report.note("times span less than a decade");
    }
    if let Ok(r) = region.inradius() {
        report.measure("inradius", r);
        report.flag("times_below_inradius_scale", t_max <= r * r, format!("t_max = {t_max:.3e}, inradius² = {:.3e}", r * r));
    }
    if cfg.emit_fields {
        let last = fields.last().expect("at least one time");
        report.fields.push(("p_t".into(), last.as_field()));
        report.fields.push(("u".into(), sample_field(&model, *mask.grid())));
    }
    Ok(report)
}
