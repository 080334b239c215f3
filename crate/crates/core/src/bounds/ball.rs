use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::fields::{sample_field, EigenfunctionModel};
use crate::grid::GridSpec;
use crate::heat::{heat_content, DEFAULT_STEPS};
use crate::nodal::{label_nodal_domains, DomainMask};

use super::common::{label_of, nodal_domains, walled};
use super::config::RunConfig;
use super::report::{fmt_real, ExperimentReport, Table};

/// The best ball found by [`ball_ratio`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSearch {
    /// `max |B ∩ Ω| / |B|` over balls centered at cell centers.
    pub ratio: f64,
    pub center: [f64; 2],
    pub radius: f64,
}

/// Sum of `row[l..=r]` for a row with prefix sums `pre`, wrapping if `periodic`.
fn row_count(pre: &[u32], l: i64, r: i64, periodic: bool) -> u64 {
    let n = (pre.len() - 1) as i64;
    if periodic {
        let total = pre[n as usize] as i64;
        // Count over [0, x) for any integer x.
        let upto = |x: i64| x.div_euclid(n) * total + pre[x.rem_euclid(n) as usize] as i64;
        (upto(r + 1) - upto(l)) as u64
    } else {
        let (l, r) = (l.max(0), r.min(n - 1));
        if l > r {
            0
        } else {
            (pre[r as usize + 1] - pre[l as usize]) as u64
        }
    }
}

/// Scans balls of the given radius centered at every cell center; `|B ∩ Ω|` counts
/// domain cells whose centers lie in the ball, and `|B| = π r²`.
pub fn ball_ratio(mask: &DomainMask, label: u32, radius: f64) -> Result<BallSearch> {
    let region = mask.region(label)?;
    let grid = *mask.grid();
    if !(radius >= grid.h) {
        return Err(invalid(format!("ball radius {radius:.3e} is below the grid spacing {:.3e}", grid.h)));
    }
    let prefix: Vec<Vec<u32>> = (0..grid.ny)
        .map(|j| {
            let mut pre = vec![0u32; grid.nx + 1];
            for i in 0..grid.nx {
                pre[i + 1] = pre[i] + u32::from(region.contains_cell(i, j));
            }
            pre
        })
        .collect();
    let reach = (radius / grid.h).floor() as i64;
    let chord: Vec<i64> = (0..=reach)
        .map(|d| {
            let dy = d as f64 * grid.h;
            ((radius * radius - dy * dy).max(0.0).sqrt() / grid.h + 1e-9).floor() as i64
        })
        .collect();
    let mut best = (0u64, 0usize);
    for cj in 0..grid.ny as i64 {
        for ci in 0..grid.nx as i64 {
            let mut count = 0u64;
            for dj in -reach..=reach {
                let row = cj + dj;
                let row = if grid.periodic_y {
                    row.rem_euclid(grid.ny as i64)
                } else if row < 0 || row >= grid.ny as i64 {
                    continue;
                } else {
                    row
                };
                let a = chord[dj.unsigned_abs() as usize];
                count += row_count(&prefix[row as usize], ci - a, ci + a, grid.periodic_x);
            }
            if count > best.0 {
                best = (count, grid.index(ci as usize, cj as usize));
            }
        }
    }
    let (i, j) = grid.coords(best.1);
    Ok(BallSearch {
        ratio: best.0 as f64 * grid.cell_area() / (PI * radius * radius),
        center: grid.center(i, j),
        radius,
    })
}

/// `|B ∩ S| / |B|` for the ball of radius `r` centered in the strip `S = [0,1] × [0,w]`,
/// by Simpson quadrature over the strip height.
pub fn strip_ball_fraction(w: f64, r: f64) -> f64 {
    let chord = |y: f64| {
        let dy = y - 0.5 * w;
        let s = (r * r - dy * dy).max(0.0).sqrt();
        (0.5 + s).min(1.0) - (0.5 - s).max(0.0)
    };
    let n = 2000;
    let step = w / n as f64;
    let mut sum = chord(0.0) + chord(w);
    for k in 1..n {
        sum += chord(k as f64 * step) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * step / 3.0 / (PI * r * r)
}

struct Case {
    name: String,
    mask: DomainMask,
    label: u32,
    t: f64,
    oracle: Option<f64>,
}

pub(crate) fn run(cfg: &RunConfig, name: &str, topic: &str) -> Result<ExperimentReport> {
    let cells = cfg.grid.unwrap_or(cfg.size(128, 64));
    let c1 = cfg.extra_f64("c1")?.unwrap_or(0.1);
    let mut cases = Vec::new();
    match cfg.model {
        Some(model) => {
            let mask = nodal_domains(&model, cells)?;
            let label = label_of(&mask, cfg.domain.unwrap_or(0))?;
            let lambda = model.eigenvalue();
            let t = match cfg.t {
                Some(t) => t,
                None if lambda > 0.0 => 1.0 / lambda,
                None => return Err(invalid("give --t for a model without eigenvalue")),
            };
            cases.push(Case { name: model.to_string(), mask, label, t, oracle: None });
        }
        None => {
            let square = DomainMask::from_cells(walled(1.0, 1.0, cells)?, |_, _| true);
            cases.push(Case { name: "square".into(), mask: square, label: 1, t: 1.0 / 16.0, oracle: Some(1.0) });
            let w = 0.125;
            let strip = DomainMask::from_cells(walled(1.0, w, 2 * cells)?, |_, _| true);
            cases.push(Case { name: "strip".into(), mask: strip, label: 1, t: 1.0, oracle: Some(strip_ball_fraction(w, 1.0)) });
            let torus = EigenfunctionModel::torus(1, 1)?;
            let mask = label_nodal_domains(&sample_field(&torus, GridSpec::unit_torus(cells)));
            cases.push(Case { name: "torus_domain".into(), mask, label: 1, t: 1.0 / torus.eigenvalue(), oracle: Some(1.0) });
        }
    }

    let mut report = ExperimentReport::new(name, topic);
    report.report_only = true;
    report.input("grid", cells);
    report.input("c1", fmt_real(c1));
    report.input("cases", cases.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(" "));

    let mut table = Table::new("balls", &["case", "radius", "ratio", "center_x", "center_y", "content_ratio", "oracle"]);
    for (k, case) in cases.iter().enumerate() {
        let radius = case.t.sqrt();
        let found = ball_ratio(&case.mask, case.label, radius)?;
        let region = case.mask.region(case.label)?;
        let length = region.boundary_length();
        let content = heat_content(&case.mask, case.label, case.t, DEFAULT_STEPS)?;
        let content_ratio = content / (length * radius);
        let key = &case.name;
        report.measure(&format!("{key}.ball_ratio"), found.ratio);
        report.measure(&format!("{key}.content_ratio"), content_ratio);
        let holds = content_ratio >= c1;
        report.flag(
            &format!("{key}.content_hypothesis"),
            holds,
            format!("∫p_t / (H¹ √t) = {content_ratio:.4} vs c1 = {c1}"),
        );
        if holds {
            report.measure(&format!("{key}.implied_c2"), found.ratio);
        }
        if let Some(oracle) = case.oracle {
            report.reference(&format!("{key}.oracle"), oracle);
            let rel = (found.ratio / oracle - 1.0).abs();
            report.gate(
                &format!("{key}.matches_geometric_oracle"),
                rel <= 0.05,
                format!("{} vs {} (relative {rel:.3e}, tolerance 0.05)", fmt_real(found.ratio), fmt_real(oracle)),
            );
        }
        table.push(vec![
            k as f64, radius, found.ratio, found.center[0], found.center[1], content_ratio, case.oracle.unwrap_or(f64::NAN),
        ]);
    }
    report.tables.push(table);
    Ok(report)
}
