use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::stochastic::{cone_exit_exact, cone_exit_mc, wedge_excursions, ConeSpec, McEstimate, PathEnsembleConfig};

use super::common::linear_fit;
use super::config::RunConfig;
use super::report::{fmt_real, ExperimentReport, Table};

/// Probabilities of reaching each radius before leaving the wedge, from one ensemble.
pub fn exit_profile(alpha: f64, radii: &[f64], cfg: &PathEnsembleConfig) -> Result<Vec<McEstimate>> {
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let reach = wedge_excursions(alpha, r_max, cfg)?;
    Ok(radii
        .iter()
        .map(|&r| McEstimate::from_samples(reach.iter().map(|&m| if m >= r { 1.0 } else { 0.0 })))
        .collect())
}

/// Exponent `a` and `r²` of the log-log fit `p ≈ C r^{-a}`.
pub fn fit_power_law(radii: &[f64], probs: &[f64]) -> (f64, f64) {
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
    let (_, slope, r2) = linear_fit(&x, &y);
    (-slope, r2)
}

fn decay_radii(k: u32) -> Vec<f64> {
    if k == 2 {
        vec![4.0, 8.0, 16.0]
    } else {
        // Keep the smallest probability near 1/100 of the start.
        let r_max = 100f64.powf(1.0 / k as f64);
        vec![r_max.powf(1.0 / 3.0), r_max.powf(2.0 / 3.0), r_max]
    }
}

pub(crate) fn run(cfg: &RunConfig, name: &str, topic: &str) -> Result<ExperimentReport> {
    let points: Vec<(f64, f64)> = match (cfg.alpha, cfg.r) {
        (Some(a), Some(r)) => vec![(a, r)],
        (None, None) => vec![(PI / 2.0, 2.0), (PI, 2.0), (PI / 3.0, 4.0)],
        _ => return Err(invalid("give both --alpha and --r, or neither")),
    };
    let ks: Vec<u32> = match cfg.k {
        Some(k) if k >= 1 => vec![k],
        Some(k) => return Err(invalid(format!("vanishing order must be at least 1, got {k}"))),
        None => vec![1, 2, 4, 8],
    };
    let ens = cfg.ensemble(cfg.size(200_000, 20_000));
    let decay_ens = PathEnsembleConfig { n_paths: (ens.n_paths / 2).max(1000), ..ens };

    let mut report = ExperimentReport::new(name, topic);
    report.input("points", points.iter().map(|(a, r)| format!("({a},{r})")).collect::<Vec<_>>().join(" "));
    report.input("orders", ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" "));
    report.input("paths", ens.n_paths);
    report.input("paths_per_order", decay_ens.n_paths);
    report.input("dt_at_unit_radius", cfg.dt.map_or("default".to_string(), fmt_real));
    report.input("seed", cfg.seed);
    report.input("bridge", cfg.bridge);
    report.note("steps scale with the squared radius, dt = dt₁ρ²; the allowance is √dt₁");

    let mut table = Table::new("exit_probability", &["alpha", "r", "exact", "mc", "mc_se", "allowance"]);
    for &(alpha, r) in &points {
        let spec = ConeSpec::new(alpha, r)?;
        let exact = cone_exit_exact(&spec);
        let mc = cone_exit_mc(&spec, &ens)?;
        let allowance = cfg.dt.unwrap_or_else(|| spec.default_dt()).sqrt();
        table.push(vec![alpha, r, exact, mc.mean, mc.std_error, allowance]);
        let key = format!("alpha={alpha:.6},r={r}");
        report.reference(&format!("{key}.exact"), exact);
        report.estimate(&format!("{key}.mc"), mc);
        report.gate(
            &format!("{key}.mc_matches_exact"),
            mc.agrees_with(exact, 3.0, allowance),
            format!("|{} − {}| ≤ 3·{:.3e} + {allowance:.3e}", fmt_real(mc.mean), fmt_real(exact), mc.std_error),
        );
    }
    report.tables.push(table);

    let mut decay = Table::new(
        "decay",
        &["k", "alpha", "r1", "r2", "r3", "p1", "p2", "p3", "exit_exponent_mc", "exit_exponent_exact", "survival_exponent"],
    );
    let mut previous: Option<f64> = None;
    let mut monotone = true;
    for &k in &ks {
        let alpha = PI / k as f64;
        let radii = decay_radii(k);
        let probs = exit_profile(alpha, &radii, &decay_ens)?;
        if probs.iter().any(|p| p.mean <= 0.0) {
            report.gate(&format!("k={k}.exponent_matches_exact"), false, "a radius was never reached; raise --paths");
            continue;
        }
        let means: Vec<f64> = probs.iter().map(|p| p.mean).collect();
        let exact: Vec<f64> = radii.iter().map(|&r| cone_exit_exact(&ConeSpec { alpha, r })).collect();
        let (mc_exp, _) = fit_power_law(&radii, &means);
        let (exact_exp, _) = fit_power_law(&radii, &exact);
        let survival = 0.5 * mc_exp;
        decay.push(vec![
            k as f64, alpha, radii[0], radii[1], radii[2], means[0], means[1], means[2], mc_exp, exact_exp, survival,
        ]);
        report.measure(&format!("k={k}.exit_exponent"), mc_exp);
        report.measure(&format!("k={k}.survival_exponent"), survival);
        report.reference(&format!("k={k}.exit_exponent_exact_fit"), exact_exp);
        report.reference(&format!("k={k}.survival_exponent_asymptotic"), PI / (2.0 * alpha));
        let rel = (mc_exp / exact_exp - 1.0).abs();
        report.gate(
            &format!("k={k}.exponent_matches_exact"),
            rel <= 0.1,
            format!("{mc_exp:.4} vs {exact_exp:.4} (relative {rel:.3e}, tolerance 0.1)"),
        );
        report.gate(
            &format!("k={k}.survival_exponent_below_order"),
            survival <= k as f64 * 1.1,
            format!("{survival:.4} ≤ {k} (+10%)"),
        );
        if let Some(prev) = previous {
            monotone &= mc_exp > prev;
        }
        previous = Some(mc_exp);
    }
    report.tables.push(decay);
    if ks.len() > 1 {
        report.gate("exponents_increase_with_order", monotone, "exit exponents strictly increase with k");
    }
    Ok(report)
}
