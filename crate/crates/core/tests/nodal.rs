use std::f64::consts::PI;

use nodal_heat::fields::{sample_field, EigenfunctionModel};
use nodal_heat::grid::{GridSpec, ScalarField};
use nodal_heat::nodal::{extract_nodal_set, label_nodal_domains};
use proptest::prelude::*;

/// A random trigonometric polynomial on the unit torus.
fn trig_field(grid: GridSpec, coeffs: &[(i32, i32, f64, f64)]) -> ScalarField {
    ScalarField::from_fn(grid, |p| {
        coeffs
            .iter()
            .map(|&(k, l, a, ph)| a * (2.0 * PI * (k as f64 * p[0] + l as f64 * p[1]) + ph).cos())
            .sum()
    })
}

fn coeffs() -> impl Strategy<Value = Vec<(i32, i32, f64, f64)>> {
    prop::collection::vec((-3i32..=3, -3i32..=3, 0.1f64..1.0, 0.0f64..6.3), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn domain_areas_partition_the_grid(c in coeffs(), n in 8usize..48) {
        let grid = GridSpec::unit_torus(n);
        let mask = label_nodal_domains(&trig_field(grid, &c));
        let cells: usize = (1..=mask.label_count() as u32).map(|l| mask.cell_count(l).unwrap()).sum();
        let zero = mask.labels().iter().filter(|&&l| l == 0).count();
        prop_assert_eq!(cells + zero, grid.len());
        let area: f64 = (1..=mask.label_count() as u32).map(|l| mask.area(l).unwrap()).sum();
        prop_assert!((area + mask.unlabeled_area() - grid.area()).abs() < 1e-12);
    }

    #[test]
    fn length_ignores_sign_and_scale(c in coeffs(), s in 1e-3f64..1e3) {
        let f = trig_field(GridSpec::unit_torus(40), &c);
        let base = extract_nodal_set(&f).total_length;
        let neg = extract_nodal_set(&f.map(|v| -v)).total_length;
        let scaled = extract_nodal_set(&f.map(|v| s * v)).total_length;
        prop_assert!((base - neg).abs() <= 1e-9 * base.max(1.0));
        prop_assert!((base - scaled).abs() <= 1e-9 * base.max(1.0));
    }

    #[test]
    fn boundaries_count_each_arc_twice(m in 1u32..4, n in 1u32..4) {
        let u = EigenfunctionModel::torus(m, n).unwrap();
        let grid = GridSpec::unit_torus(96);
        let field = sample_field(&u, grid);
        let mask = label_nodal_domains(&field);
        let z = extract_nodal_set(&field).total_length;
        let sum: f64 = (1..=mask.label_count() as u32).map(|l| mask.region(l).unwrap().boundary_length()).sum();
        // Four domains meet at each of the 4mn crossings and each cuts its corner there,
        // losing about (2 − √2)·h/2 apiece.
        let tol = 4.0 * (m * n) as f64 * 1.5 * grid.h;
        prop_assert!((sum - 2.0 * z).abs() <= tol, "{} vs {}", sum, 2.0 * z);
    }
}

#[test]
fn refinement_converges_towards_the_closed_form() {
    // Nodal set of sin(2πx)sin(4πy) on the torus: 2 vertical and 4 horizontal unit lines.
    let u = EigenfunctionModel::torus(1, 2).unwrap();
    let dev: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| (extract_nodal_set(&sample_field(&u, GridSpec::unit_torus(n))).total_length - 6.0).abs())
        .collect();
    for w in dev.windows(2) {
        assert!(w[1] <= 2.0 * w[0] + 1e-12, "{dev:?}");
    }
    assert!(dev[3] < 0.05, "{dev:?}");
}

#[test]
fn generic_level_set_length() {
    // cos 2πx + cos 2πy vanishes on the diagonals x ± y = 1/2 (mod 1): length 2√2.
    let f = ScalarField::from_fn(GridSpec::unit_torus(256), |p| (2.0 * PI * p[0]).cos() + (2.0 * PI * p[1]).cos());
    let z = extract_nodal_set(&f).total_length;
    assert!((z - 2.0 * 2.0f64.sqrt()).abs() < 0.02, "{z}");
}
