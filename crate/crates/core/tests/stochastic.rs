use nodal_heat::fields::{sample_field, EigenfunctionModel};
use nodal_heat::grid::GridSpec;
use nodal_heat::heat::{solve_hitting_field, DEFAULT_STEPS};
use nodal_heat::nodal::{label_nodal_domains, DomainMask};
use nodal_heat::stochastic::{
    estimate_hitting_probability, hitting_probability_in, simulate_from, HalfPlane, KillingDomain, PathEnsembleConfig,
    RegionDomain,
};
use proptest::prelude::*;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn torus_domain(cells: usize) -> (EigenfunctionModel, DomainMask, u32) {
    let u = EigenfunctionModel::torus(1, 1).unwrap();
    let mask = label_nodal_domains(&sample_field(&u, GridSpec::unit_torus(cells)));
    let label = mask.label_at(cells / 4, cells / 4);
    (u, mask, label)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn estimates_ignore_thread_count(seed in any::<u64>(), threads in 2usize..6) {
        let (_, mask, label) = torus_domain(32);
        let cfg = PathEnsembleConfig::with_paths(500, seed);
        let run = || estimate_hitting_probability(&mask, label, [0.2, 0.3], 0.005, &cfg).unwrap();
        let one = in_pool(1, run);
        let many = in_pool(threads, run);
        prop_assert_eq!(one.mean.to_bits(), many.mean.to_bits());
        prop_assert_eq!(one.std_error.to_bits(), many.std_error.to_bits());
    }

    #[test]
    fn paths_are_reproducible(seed in any::<u64>(), x in -0.4f64..0.4) {
        let cfg = PathEnsembleConfig::with_paths(200, seed);
        let d = HalfPlane::below_x(0.5);
        let a = simulate_from(&d, [x, 0.0], 0.1, &cfg, 9).unwrap();
        let b = simulate_from(&d, [x, 0.0], 0.1, &cfg, 9).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn hitting_grows_with_time() {
    let (_, mask, label) = torus_domain(64);
    let cfg = PathEnsembleConfig::with_paths(20_000, 11);
    let times = [0.002, 0.005, 0.01, 0.02];
    let est: Vec<_> = times.iter().map(|&t| estimate_hitting_probability(&mask, label, [0.2, 0.2], t, &cfg).unwrap()).collect();
    for w in est.windows(2) {
        assert!(w[0].mean <= w[1].mean + 3.0 * (w[0].std_error + w[1].std_error), "{est:?}");
    }
}

#[test]
fn smaller_domains_are_left_sooner() {
    let grid = GridSpec::rectangle(1.0, 1.0, 64).unwrap();
    let big = DomainMask::from_cells(grid, |_, _| true);
    let small = DomainMask::from_cells(grid, |i, j| i >= 8 && j >= 8);
    let cfg = PathEnsembleConfig::with_paths(20_000, 12);
    let x = [0.4, 0.4];
    let a = estimate_hitting_probability(&big, 1, x, 0.02, &cfg).unwrap();
    let b = estimate_hitting_probability(&small, 1, x, 0.02, &cfg).unwrap();
    assert!(b.mean >= a.mean - 3.0 * (a.std_error + b.std_error), "{a:?} {b:?}");
}

#[test]
fn monte_carlo_agrees_with_the_pde_at_interior_points() {
    let (u, mask, label) = torus_domain(128);
    let grid = *mask.grid();
    let t = 1.0 / u.eigenvalue();
    let p = solve_hitting_field(&mask, label, t, DEFAULT_STEPS).unwrap();
    let region = mask.region(label).unwrap();
    let domain = RegionDomain::new(&region);
    let cells: Vec<(usize, usize)> =
        region.cells().filter(|&(i, j)| domain.boundary_distance(grid.center(i, j)) >= 2.0 * grid.h).collect();
    let cfg = PathEnsembleConfig::with_paths(10_000, 13);
    let (_, dt) = cfg.steps_for(t).unwrap();
    for k in 0..10 {
        let (i, j) = cells[(k * 977 + 5) % cells.len()];
        let est = estimate_hitting_probability(&mask, label, grid.center(i, j), t, &cfg).unwrap();
        // Stair-step and time-step biases are each of order h and √dt at the boundary.
        let allowance = 3.0 * est.std_error + grid.h + dt.sqrt();
        assert!((est.mean - p.get(i, j)).abs() <= allowance, "({i},{j}): {} vs {}", est.mean, p.get(i, j));
    }
}

#[test]
fn bridge_correction_improves_the_bias_order() {
    // P(sup_{s≤t} B_s > a) = erfc(a / 2√t) for the coordinate process with variance 2t.
    let (a, t) = (0.3, 0.05);
    let exact = libm::erfc(a / (2.0 * f64::sqrt(t)));
    let bias = |dt: f64, bridge: bool| {
        let cfg = PathEnsembleConfig { n_paths: 200_000, dt: Some(dt), seed: 14, bridge_correction: bridge };
        (hitting_probability_in(&HalfPlane::below_x(a), [0.0, 0.0], t, &cfg).unwrap().mean - exact).abs()
    };
    let (coarse, fine) = (t / 100.0, t / 400.0);
    let plain = [bias(coarse, false), bias(fine, false)];
    let bridged = [bias(coarse, true), bias(fine, true)];
    // Without the bridge, quartering dt halves the bias (√dt); with it the bias is near the noise.
    assert!(plain[0] / plain[1] > 1.5 && plain[0] / plain[1] < 2.8, "{plain:?}");
    assert!(bridged[0] < 0.2 * plain[0] && bridged[1] < 0.2 * plain[1], "{bridged:?} vs {plain:?}");
}
