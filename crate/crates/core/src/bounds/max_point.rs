use crate::error::Result;
use crate::fields::EigenfunctionModel;
use crate::heat::{solve_hitting_field, DEFAULT_STEPS};
use crate::stochastic::{hitting_probability_in, RegionDomain};

use super::common::{label_of, nodal_domains, record_ensemble};
use super::config::RunConfig;
use super::report::{fmt_real, ExperimentReport, Table};

pub(crate) fn run(cfg: &RunConfig, name: &str, topic: &str) -> Result<ExperimentReport> {
    let models = match cfg.model {
        Some(m) => vec![m],
        None => vec![EigenfunctionModel::torus(1, 1)?, EigenfunctionModel::rectangle(1, 1, 1.0, 1.0)?],
    };
    let cells = cfg.grid.unwrap_or(cfg.size(128, 64));
    let ens = cfg.ensemble(cfg.size(100_000, 20_000));

    let mut report = ExperimentReport::new(name, topic);
    report.input("models", models.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "));
    report.input("grid", cells);
    report.input("t", cfg.t.map_or("1/lambda".to_string(), fmt_real));
    record_ensemble(&mut report, cfg, ens.n_paths);

    let mut table = Table::new("max_points", &["lambda", "t", "x", "y", "p_fd", "p_mc", "p_mc_se", "bound"]);
    for model in &models {
        let lambda = model.eigenvalue();
        if lambda <= 0.0 {
            return Err(crate::error::invalid(format!("{model} has no eigenvalue")));
        }
        let t = cfg.t.unwrap_or(1.0 / lambda);
        let mask = nodal_domains(model, cells)?;
        let grid = *mask.grid();
        let label = label_of(&mask, cfg.domain.unwrap_or(0))?;
        let region = mask.region(label)?;
        let (i, j) = region.argmax();
        let x = grid.center(i, j);
        let bound = 1.0 - (-lambda * t).exp();
        let p_fd = solve_hitting_field(&mask, label, t, DEFAULT_STEPS)?.get(i, j);
        let p_mc = hitting_probability_in(&RegionDomain::new(&region), x, t, &ens)?;
        table.push(vec![lambda, t, x[0], x[1], p_fd, p_mc.mean, p_mc.std_error, bound]);
        report.measure(&format!("{model}.p_fd_at_max"), p_fd);
        report.estimate(&format!("{model}.p_mc_at_max"), p_mc);
        report.reference(&format!("{model}.bound"), bound);
        report.gate(
            &format!("{model}.fd_below_bound"),
            p_fd <= bound,
            format!("{} ≤ {} at ({:.6}, {:.6})", fmt_real(p_fd), fmt_real(bound), x[0], x[1]),
        );
        report.gate(
            &format!("{model}.mc_below_bound"),
            p_mc.mean <= bound + 3.0 * p_mc.std_error,
            format!("{} ≤ {} + 3·{:.3e}", fmt_real(p_mc.mean), fmt_real(bound), p_mc.std_error),
        );
        report.flag(
            &format!("{model}.backends_agree"),
            p_mc.agrees_with(p_fd, 3.0, ens.steps_for(t)?.1.sqrt()),
            format!("mc {} vs fd {}", fmt_real(p_mc.mean), fmt_real(p_fd)),
        );
    }
    report.tables.push(table);
    Ok(report)
}
