use rand::Rng;

use crate::error::Result;
use crate::fields::{compute_norms, sample_field, EigenfunctionModel, PlanarFunction};
use crate::heat::{dirichlet_semigroup_field, solve_hitting_field, DEFAULT_STEPS};
use crate::stochastic::rng::path_rng;
use crate::stochastic::{
    conservation_check, shared_path_estimates_in, KillingDomain, PathEnsembleConfig, RegionDomain,
};

use super::common::{eigen_model, label_of, nodal_domains, record_ensemble};
use super::config::RunConfig;
use super::report::{fmt_real, ExperimentReport, Table};

const POINT_TAG: u64 = 5;
const RANDOM_POINTS: usize = 10;

pub(crate) fn run(cfg: &RunConfig, name: &str, topic: &str) -> Result<ExperimentReport> {
    let model = eigen_model(cfg, EigenfunctionModel::torus(1, 1)?)?;
    let cells = cfg.grid.unwrap_or(cfg.size(256, 128));
    let lambda = model.eigenvalue();
    let t = cfg.t.unwrap_or(1.0 / lambda);
    let ens = cfg.ensemble(cfg.size(100_000, 20_000));
    let point_ens = PathEnsembleConfig { n_paths: (ens.n_paths / 10).max(1000), ..ens };

    let mut report = ExperimentReport::new(name, topic);
    report.input("model", model);
    report.input("grid", cells);
    report.input("t", fmt_real(t));
    record_ensemble(&mut report, cfg, ens.n_paths);
    report.input("paths_per_random_point", point_ens.n_paths);

    let mask = nodal_domains(&model, cells)?;
    let grid = *mask.grid();
    let label = label_of(&mask, cfg.domain.unwrap_or(0))?;
    report.input("domain", label - 1);
    let region = mask.region(label)?;
    let norms = compute_norms(&model, &region)?;
    let domain = RegionDomain::new(&region);
    let (_, dt) = ens.steps_for(t)?;
    report.measure("lambda", lambda);
    report.measure("l1", norms.l1);
    report.measure("linf", norms.linf);
    report.measure("grad_linf", norms.grad_linf);
    report.measure("dt", dt);

    // Explicit solution against the finite-difference Dirichlet evolution.
    let decay = (-lambda * t).exp();
    report.reference("decay_factor", decay);
    let v = dirichlet_semigroup_field(&model, &mask, label, t, DEFAULT_STEPS)?;
    let mut worst = 0.0_f64;
    for (i, j) in region.cells() {
        let exact = decay * model.value(grid.center(i, j));
        worst = worst.max(((v.get(i, j) - exact) / exact).abs());
    }
    report.measure("fd_dirichlet_max_relative_error", worst);
    report.gate("fd_matches_explicit_solution", worst <= 0.01, format!("max relative error {worst:.3e} (tolerance 1e-2)"));

    // Shared-path estimates at the maximum.
    let (ai, aj) = region.argmax();
    let x_star = grid.center(ai, aj);
    let at_max = shared_path_estimates_in(&model, &domain, x_star, t, &ens)?;
    let allowance = dt.sqrt() * norms.linf;
    report.estimate("dirichlet_at_max", at_max.dirichlet);
    report.estimate("hitting_at_max", at_max.hitting);
    report.reference("explicit_at_max", decay * at_max.u_x);
    report.gate(
        "mc_matches_explicit_solution",
        at_max.dirichlet.agrees_with(decay * at_max.u_x, 3.0, allowance),
        format!(
            "{} vs {} (3 se = {:.3e}, allowance sqrt(dt)·linf = {:.3e})",
            fmt_real(at_max.dirichlet.mean),
            fmt_real(decay * at_max.u_x),
            3.0 * at_max.dirichlet.std_error,
            allowance
        ),
    );
    let p_fd = solve_hitting_field(&mask, label, t, DEFAULT_STEPS)?.get(ai, aj);
    report.measure("fd_hitting_at_max", p_fd);
    report.flag(
        "mc_hitting_matches_fd",
        at_max.hitting.agrees_with(p_fd, 3.0, dt.sqrt()),
        format!("{} vs {}", fmt_real(at_max.hitting.mean), fmt_real(p_fd)),
    );

    // Identity, sign and constant at random interior points plus the maximum.
    let interior: Vec<(usize, usize)> =
        region.cells().filter(|&(i, j)| domain.boundary_distance(grid.center(i, j)) >= grid.h).collect();
    let mut rng = path_rng(cfg.seed, POINT_TAG, 0);
    let mut points: Vec<[f64; 2]> = (0..RANDOM_POINTS.min(interior.len()))
        .map(|_| {
            let (i, j) = interior[rng.random_range(0..interior.len())];
            grid.center(i, j)
        })
        .collect();
    points.push(x_star);
    let mut table = Table::new(
        "points",
        &["x", "y", "u", "distance", "hitting", "hitting_se", "dirichlet", "xi", "gap", "identity_residual", "c_measured"],
    );
    let (mut worst_residual, mut worst_sign, mut c_max, mut c_geom_excess) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let sqrt_t = t.sqrt();
    for (k, &x) in points.iter().enumerate() {
        let est = if k + 1 == points.len() { at_max } else { shared_path_estimates_in(&model, &domain, x, t, &point_ens)? };
        let gap = est.xi.mean - est.dirichlet.mean;
        let d = domain.boundary_distance(x);
        let c = if est.hitting.mean > 0.0 { gap.abs() / (sqrt_t * est.hitting.mean * norms.grad_linf) } else { 0.0 };
        worst_residual = worst_residual.max(est.identity_residual.abs() / est.u_x.abs().max(1.0));
        worst_sign = worst_sign.min(gap * est.u_x.signum());
        c_max = c_max.max(c);
        c_geom_excess = c_geom_excess.max(c - d / sqrt_t);
        table.push(vec![
            x[0], x[1], est.u_x, d, est.hitting.mean, est.hitting.std_error, est.dirichlet.mean, est.xi.mean, gap,
            est.identity_residual, c,
        ]);
    }
    report.tables.push(table);
    report.measure("identity_residual_max", worst_residual);
    report.measure("comparison_constant", c_max);
    report.gate(
        "shared_path_identity",
        worst_residual <= 1e-12,
        format!("max |xi − dirichlet − hitting·u| / max(1, |u|) = {worst_residual:.3e} over {} points", points.len()),
    );
    report.gate("gap_has_sign_of_u", worst_sign >= 0.0, format!("min sign(u)·gap = {}", fmt_real(worst_sign)));
    report.flag(
        "constant_below_distance_ratio",
        c_geom_excess <= 1e-9 + grid.h / sqrt_t,
        format!("max over points of C − d/√t = {c_geom_excess:.3e}"),
    );

    // A start one cell from the boundary.
    let near = region
        .cells()
        .filter(|&(_, j)| j == aj)
        .map(|(i, j)| grid.center(i, j))
        .min_by(|a, b| {
            let da = (domain.boundary_distance(*a) - grid.h).abs();
            let db = (domain.boundary_distance(*b) - grid.h).abs();
            da.total_cmp(&db)
        })
        .expect("the row of the maximum is nonempty");
    let est = shared_path_estimates_in(&model, &domain, near, t, &point_ens)?;
    let gap = est.xi.mean - est.dirichlet.mean;
    let bound = 2.0 * grid.h * norms.grad_linf;
    report.measure("near_boundary_distance", domain.boundary_distance(near));
    report.measure("near_boundary_gap", gap);
    report.reference("near_boundary_bound", bound);
    report.gate(
        "near_boundary_gap_bound",
        gap.abs() <= bound + 3.0 * est.xi.std_error,
        format!("|gap| = {:.3e} vs 2h·grad_linf = {bound:.3e}", gap.abs()),
    );

    // Conservation of the integral under the frozen-mass evolution.
    let cons = conservation_check(&model, &mask, label, t, &ens)?;
    let integral_u: f64 = region.cells().map(|(i, j)| model.value(grid.center(i, j))).sum::<f64>() * grid.cell_area();
    report.estimate("integral_u_mc", cons.integral_u);
    report.estimate("integral_xi_mc", cons.integral_xi);
    report.estimate("integral_difference_mc", cons.difference);
    report.measure("integral_u_midpoint", integral_u);
    report.gate(
        "integral_conserved",
        cons.difference.mean.abs() <= 3.0 * cons.difference.std_error + 1e-15,
        format!(
            "∫(Ξ-evolved − u) = {} with 3 se = {:.3e}",
            fmt_real(cons.difference.mean),
            3.0 * cons.difference.std_error
        ),
    );
    if cfg.emit_fields {
        report.fields.push(("u".into(), sample_field(&model, grid)));
        report.fields.push(("dirichlet_t".into(), v));
        report.fields.push(("p_t".into(), solve_hitting_field(&mask, label, t, DEFAULT_STEPS)?.as_field()));
    }
    Ok(report)
}
