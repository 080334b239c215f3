use nodal_heat::fields::{sample_field, EigenfunctionModel, PlanarFunction};
use nodal_heat::grid::GridSpec;
use nodal_heat::heat::{dirichlet_semigroup_field, heat_content, solve_hitting_field, DEFAULT_STEPS};
use nodal_heat::nodal::{label_nodal_domains, DomainMask};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hitting_field_obeys_the_maximum_principle(
        n in 12usize..40,
        holes in prop::collection::vec((0usize..40, 0usize..40), 0..6),
        t in 1e-4f64..1.0,
    ) {
        let grid = GridSpec::rectangle(1.0, 1.0, n).unwrap();
        let mask = DomainMask::from_cells(grid, |i, j| !holes.iter().any(|&(a, b)| a % n == i && b % n == j));
        let label = mask.largest_label().unwrap();
        let p = solve_hitting_field(&mask, label, t, 20).unwrap();
        prop_assert!(p.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!(p.clip <= 1e-8);
        prop_assert!(p.content <= mask.area(label).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn positive_data_stays_positive(m in 1u32..3, n in 1u32..3, t in 1e-3f64..0.2) {
        let u = EigenfunctionModel::rectangle(m, n, 1.0, 1.0).unwrap();
        let mask = label_nodal_domains(&sample_field(&u, u.natural_grid(48).unwrap()));
        for label in 1..=mask.label_count() as u32 {
            let sign = mask.sign(label).unwrap() as f64;
            let v = dirichlet_semigroup_field(&u, &mask, label, t, 20).unwrap();
            let scale = v.max_abs();
            for (i, j) in mask.region(label).unwrap().cells() {
                prop_assert!(sign * v.get(i, j) >= -1e-8 * scale);
            }
        }
    }
}

#[test]
fn integrated_identity_on_several_models() {
    for (u, grid) in [
        (EigenfunctionModel::torus(1, 2).unwrap(), GridSpec::unit_torus(96)),
        (EigenfunctionModel::torus(2, 3).unwrap(), GridSpec::unit_torus(120)),
        (EigenfunctionModel::rectangle(2, 1, 1.0, 1.0).unwrap(), GridSpec::rectangle(1.0, 1.0, 96).unwrap()),
    ] {
        let mask = label_nodal_domains(&sample_field(&u, grid));
        let t = 1.0 / u.eigenvalue();
        for label in 1..=mask.label_count().min(4) as u32 {
            let p = solve_hitting_field(&mask, label, t, DEFAULT_STEPS).unwrap();
            let v = dirichlet_semigroup_field(&u, &mask, label, t, DEFAULT_STEPS).unwrap();
            let (mut lhs, mut rhs, mut norm) = (0.0, 0.0, 0.0);
            for (i, j) in mask.region(label).unwrap().cells() {
                let ux = u.value(grid.center(i, j));
                lhs += p.get(i, j) * ux;
                rhs += ux - v.get(i, j);
                norm += ux.abs();
            }
            assert!((lhs - rhs).abs() <= 1e-9 * norm, "{u} label {label}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn content_mesh_convergence_on_a_torus_domain() {
    let u = EigenfunctionModel::torus(1, 1).unwrap();
    let t = 0.2 / u.eigenvalue();
    let c: Vec<f64> = [32, 64, 128, 256]
        .iter()
        .map(|&n| {
            let mask = label_nodal_domains(&sample_field(&u, GridSpec::unit_torus(n)));
            heat_content(&mask, 1, t, 20).unwrap()
        })
        .collect();
    for w in c.windows(3) {
        assert!((w[2] - w[1]).abs() <= 2.0 * (w[1] - w[0]).abs() + 1e-12, "{c:?}");
    }
}

#[test]
fn content_grows_with_the_domain_boundary() {
    // Punching a hole adds absorbing boundary, so the content of the rest can only grow.
    let grid = GridSpec::rectangle(1.0, 1.0, 64).unwrap();
    let full = DomainMask::from_cells(grid, |_, _| true);
    let holed = DomainMask::from_cells(grid, |i, j| !(30..34).contains(&i) || !(30..34).contains(&j));
    let t = 1e-3;
    let a = solve_hitting_field(&full, 1, t, 20).unwrap();
    let b = solve_hitting_field(&holed, 1, t, 20).unwrap();
    for (i, j) in holed.region(1).unwrap().cells() {
        assert!(b.get(i, j) >= a.get(i, j) - 1e-12);
    }
}
