use std::f64::consts::PI;

use super::*;
use crate::fields::{sample_field, EigenfunctionModel, PlanarFunction};
use crate::grid::GridSpec;
use crate::nodal::label_nodal_domains;
use crate::special::erfc;

/// Survival in `(0, l)` with killing at both ends, generator `d²/dx²`.
fn survival_1d(x: f64, t: f64, l: f64) -> f64 {
    (0..2000)
        .map(|n| 2 * n + 1)
        .map(|k| {
            let k = k as f64;
            4.0 / (k * PI) * (k * PI * x / l).sin() * (-(k * PI / l).powi(2) * t).exp()
        })
        .sum()
}

/// Mean of [`survival_1d`] over `(0, l)`.
fn mean_survival_1d(t: f64, l: f64) -> f64 {
    (0..200_000)
        .map(|n| (2 * n + 1) as f64)
        .map(|k| 8.0 / (k * k * PI * PI) * (-(k * PI / l).powi(2) * t).exp())
        .sum()
}

fn unit_square(n: usize) -> DomainMask {
    DomainMask::from_cells(GridSpec::rectangle(1.0, 1.0, n).unwrap(), |_, _| true)
}

#[test]
fn oracles_are_consistent() {
    assert!((survival_1d(0.5, 1e-3, 1.0) - 1.0).abs() < 1e-9);
    assert!((survival_1d(0.1, 1e-3, 1.0) - (1.0 - erfc(0.1 / (2.0 * 1e-3f64.sqrt())))).abs() < 1e-3);
    assert!((1.0 - mean_survival_1d(1e-4, 1.0) - 4.0 * (1e-4 / PI).sqrt()).abs() < 1e-6);
}

#[test]
fn half_plane_profile_matches_erfc() {
    let grid = GridSpec::new(400, 4, [0.0, 0.0], [2.0, 0.02], [false, true]).unwrap();
    let mask = DomainMask::from_cells(grid, |_, _| true);
    let d = grid.center(19, 0)[0];
    let t = (0.5 * d).powi(2);
    let p = solve_hitting_field(&mask, 1, t, 100).unwrap();
    let exact = erfc(1.0);
    assert!((p.get(19, 2) - exact).abs() < 2e-3, "{} vs {exact}", p.get(19, 2));
    assert_eq!(p.get(19, 0), p.get(19, 3));
}

#[test]
fn square_center_matches_product_series() {
    let mask = unit_square(256);
    let t = 0.01;
    // The centre is five diffusion lengths from the walls, deep in the tail.
    let p = solve_hitting_field(&mask, 1, t, 160).unwrap();
    let got = p.get(127, 127);
    let c = 0.5 - 0.5 / 256.0;
    let exact = 1.0 - survival_1d(c, t, 1.0).powi(2);
    assert!((got / exact - 1.0).abs() < 0.01, "{got} vs {exact}");
}

#[test]
fn long_times_absorb_everything() {
    let mask = unit_square(32);
    let p = solve_hitting_field(&mask, 1, 20.0, 40).unwrap();
    assert!(p.values.iter().all(|&v| v >= 0.99));
    assert!(p.content <= 1.0 + 1e-12);
}

#[test]
fn zero_time_and_bad_inputs() {
    let mask = unit_square(16);
    let p = solve_hitting_field(&mask, 1, 0.0, 10).unwrap();
    assert_eq!(p.content, 0.0);
    assert_eq!(heat_content(&mask, 1, 0.0, 10).unwrap(), 0.0);
    assert!(solve_hitting_field(&mask, 1, 0.1, 9).is_err());
    assert!(solve_hitting_field(&mask, 2, 0.1, 10).is_err());
    assert!(heat_content_curve(&mask, 1, &[1e-4, 2e-4, 3e-4], 10).is_err());
}

#[test]
fn square_heat_content_small_time() {
    let mask = unit_square(256);
    let t = 1e-4;
    let got = heat_content(&mask, 1, t, 40).unwrap();
    let half_space = 8.0 * (t / PI).sqrt();
    let exact = 1.0 - mean_survival_1d(t, 1.0).powi(2);
    assert!((got / half_space - 1.0).abs() < 0.03, "{got} vs {half_space}");
    assert!((got / exact - 1.0).abs() < 0.01, "{got} vs {exact}");
}

#[test]
fn torus_quarter_domain_content_matches_series() {
    let u = EigenfunctionModel::torus(1, 1).unwrap();
    let mask = label_nodal_domains(&sample_field(&u, GridSpec::unit_torus(256)));
    let t = 1.0 / u.eigenvalue();
    let got = heat_content(&mask, 1, t, 40).unwrap();
    let exact = 0.25 * (1.0 - mean_survival_1d(t, 0.5).powi(2));
    assert!((got / exact - 1.0).abs() < 0.01, "{got} vs {exact}");
}

#[test]
fn contents_are_monotone_and_bounded() {
    let mask = unit_square(64);
    let times = log_times(1e-4, 1e-1, 7);
    let curve = heat_content_curve(&mask, 1, &times, 20).unwrap();
    for w in curve.contents.windows(2) {
        assert!(w[1] >= w[0] - 1e-12);
    }
    assert!(curve.contents.iter().all(|&c| c <= 1.0));
    assert!(curve.clip <= 1e-8);
}

#[test]
fn sqrt_law_on_the_square() {
    let mask = unit_square(512);
    let times = log_times(1e-5, 1e-4, 6);
    let curve = heat_content_curve(&mask, 1, &times, 20).unwrap();
    let expected = 8.0 / PI.sqrt();
    assert!((curve.slope_fit.c / expected - 1.0).abs() < 0.03, "{:?}", curve.slope_fit);
    assert!(curve.slope_fit.r2 >= 0.999, "{:?}", curve.slope_fit);
    assert!(curve.warnings.is_empty(), "{:?}", curve.warnings);
}

#[test]
fn diffusive_scaling() {
    let small = DomainMask::from_cells(GridSpec::rectangle(1.0, 1.0, 64).unwrap(), |_, _| true);
    let big = DomainMask::from_cells(GridSpec::rectangle(2.0, 2.0, 32).unwrap(), |_, _| true);
    let t = 2e-3;
    let a = heat_content(&small, 1, t, 20).unwrap();
    let b = heat_content(&big, 1, 4.0 * t, 20).unwrap();
    // Area scales by 4 and p_{4t}(2x) = p_t(x).
    assert!((b / a - 4.0).abs() < 1e-9, "{}", b / a);
    // At fixed small t only the boundary length matters.
    let c = heat_content(&big, 1, t / 4.0, 20).unwrap();
    let d = heat_content(&DomainMask::from_cells(GridSpec::rectangle(1.0, 1.0, 32).unwrap(), |_, _| true), 1, t / 4.0, 20).unwrap();
    assert!((c / d - 2.0).abs() < 0.05, "{}", c / d);
}

#[test]
fn torus_2_3_slope() {
    let u = EigenfunctionModel::torus(2, 3).unwrap();
    let mask = label_nodal_domains(&sample_field(&u, GridSpec::unit_torus(480)));
    let times = log_times(1e-5, 1e-4, 5);
    let curve = heat_content_curve(&mask, 1, &times, 20).unwrap();
    let expected = 2.0 / PI.sqrt() * mask.region(1).unwrap().boundary_length();
    assert!((curve.slope_fit.c / expected - 1.0).abs() < 0.05, "{} vs {expected}", curve.slope_fit.c);
    assert!((expected - 2.0 / PI.sqrt() * 5.0 / 6.0).abs() < 0.02);
}

#[test]
fn explicit_dirichlet_solution() {
    let u = EigenfunctionModel::torus(1, 1).unwrap();
    let grid = GridSpec::unit_torus(256);
    let mask = label_nodal_domains(&sample_field(&u, grid));
    let t = 1.0 / u.eigenvalue();
    let v = dirichlet_semigroup_field(&u, &mask, 1, t, 40).unwrap();
    let region = mask.region(1).unwrap();
    let decay = (-1.0f64).exp();
    let mut worst = 0.0_f64;
    for (i, j) in region.cells() {
        let exact = decay * u.value(grid.center(i, j));
        worst = worst.max(((v.get(i, j) - exact) / exact).abs());
    }
    assert!(worst <= 0.01, "{worst}");
    let v0 = dirichlet_semigroup_field(&u, &mask, 1, 0.0, 40).unwrap();
    for (i, j) in region.cells() {
        assert_eq!(v0.get(i, j), u.value(grid.center(i, j)));
    }
}

#[test]
fn semigroup_property() {
    let u = EigenfunctionModel::torus(1, 2).unwrap();
    let mask = label_nodal_domains(&sample_field(&u, GridSpec::unit_torus(96)));
    let op = HeatOperator::new(&mask.region(1).unwrap()).unwrap();
    let grid = *mask.grid();
    let u0: Vec<f64> = op.cells().iter().map(|&k| {
        let (i, j) = grid.coords(k);
        u.value(grid.center(i, j))
    }).collect();
    let t = 1.0 / u.eigenvalue();
    let once = op.evolve(&u0, 0.0, t, 40, false).unwrap();
    let half = op.evolve(&u0, 0.0, 0.5 * t, 20, false).unwrap();
    let twice = op.evolve(&half, 0.0, 0.5 * t, 20, false).unwrap();
    let scale = u0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let diff = once.iter().zip(&twice).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff <= 1e-10 * scale, "{diff}");
}

#[test]
fn integrated_identity_holds_to_solver_tolerance() {
    let u = EigenfunctionModel::torus(1, 1).unwrap();
    let mask = label_nodal_domains(&sample_field(&u, GridSpec::unit_torus(128)));
    let grid = *mask.grid();
    let t = 1.0 / u.eigenvalue();
    for label in 1..=4 {
        let p = solve_hitting_field(&mask, label, t, 40).unwrap();
        let v = dirichlet_semigroup_field(&u, &mask, label, t, 40).unwrap();
        let (mut lhs, mut rhs, mut norm) = (0.0, 0.0, 0.0);
        for (i, j) in mask.region(label).unwrap().cells() {
            let ux = u.value(grid.center(i, j));
            lhs += p.get(i, j) * ux;
            rhs += ux - v.get(i, j);
            norm += ux.abs();
        }
        assert!((lhs - rhs).abs() <= 1e-9 * norm, "{lhs} vs {rhs}");
    }
}

#[test]
fn nonnegative_data_stays_nonnegative() {
    let u = EigenfunctionModel::rectangle(1, 1, 1.0, 1.0).unwrap();
    let mask = label_nodal_domains(&sample_field(&u, u.natural_grid(64).unwrap()));
    let v = dirichlet_semigroup_field(&u, &mask, 1, 0.05, 20).unwrap();
    assert!(v.min() >= -1e-8);
}

#[test]
fn mesh_refinement_is_controlled() {
    let t = 1e-3;
    let c: Vec<f64> = [32, 64, 128].iter().map(|&n| heat_content(&unit_square(n), 1, t, 20).unwrap()).collect();
    assert!((c[2] - c[1]).abs() <= 2.0 * (c[1] - c[0]).abs() + 1e-12, "{c:?}");
}

#[test]
fn slope_fit_recovers_exact_law() {
    let times = log_times(1e-5, 1e-4, 8);
    let contents: Vec<f64> = times.iter().map(|t| 3.0 * t.sqrt()).collect();
    let fit = fit_sqrt_slope(&times, &contents);
    assert!((fit.c - 3.0).abs() < 1e-12);
    assert!((fit.r2 - 1.0).abs() < 1e-12);
}
