use std::f64::consts::PI;

use nodal_heat::fields::{compute_norms, eigen_residual, sample_field, EigenfunctionModel, PlanarFunction};
use nodal_heat::grid::GridSpec;
use nodal_heat::nodal::label_nodal_domains;
use proptest::prelude::*;

fn models() -> Vec<EigenfunctionModel> {
    vec![
        EigenfunctionModel::torus(1, 2).unwrap(),
        EigenfunctionModel::torus(3, 1).unwrap(),
        EigenfunctionModel::rectangle(2, 3, 1.0, 1.5).unwrap(),
        EigenfunctionModel::disk(2, 1, 1.0).unwrap(),
    ]
}

#[test]
fn residual_is_second_order() {
    for model in models() {
        let coarse = eigen_residual(&model, &model.natural_grid(64).unwrap());
        let fine = eigen_residual(&model, &model.natural_grid(128).unwrap());
        let ratio = coarse / fine;
        assert!((3.0..=5.0).contains(&ratio), "{model}: residual ratio {ratio}");
    }
}

#[test]
fn gradients_match_central_differences() {
    for model in models() {
        let grid = model.natural_grid(32).unwrap();
        let e = 1e-5;
        let mut worst = 0.0_f64;
        let scale = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.coords(k);
                let g = model.gradient(grid.center(i, j));
                g[0].hypot(g[1])
            })
            .fold(0.0, f64::max);
        for j in 2..grid.ny - 2 {
            for i in 2..grid.nx - 2 {
                let p = grid.center(i, j);
                if !model.in_support(p) {
                    continue;
                }
                let g = model.gradient(p);
                let fd = [
                    (model.value([p[0] + e, p[1]]) - model.value([p[0] - e, p[1]])) / (2.0 * e),
                    (model.value([p[0], p[1] + e]) - model.value([p[0], p[1] - e])) / (2.0 * e),
                ];
                worst = worst.max((g[0] - fd[0]).abs().max((g[1] - fd[1]).abs()) / scale);
            }
        }
        assert!(worst < 1e-7, "{model}: {worst}");
    }
}

#[test]
fn disk_mode_vanishes_on_the_rim() {
    let model = EigenfunctionModel::disk(2, 1, 1.0).unwrap();
    for k in 0..16 {
        let th = k as f64 * PI / 8.0;
        assert!(model.value([th.cos(), th.sin()]).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn swapped_torus_modes_have_equal_norms(m in 1u32..4, n in 1u32..4) {
        let grid = GridSpec::unit_torus(48);
        let a = EigenfunctionModel::torus(m, n).unwrap();
        let b = EigenfunctionModel::torus(n, m).unwrap();
        prop_assert_eq!(a.eigenvalue(), b.eigenvalue());
        let ma = label_nodal_domains(&sample_field(&a, grid));
        let mb = label_nodal_domains(&sample_field(&b, grid));
        prop_assert_eq!(ma.label_count(), mb.label_count());
        let na = compute_norms(&a, &ma.region(1).unwrap()).unwrap();
        let nb = compute_norms(&b, &mb.region(1).unwrap()).unwrap();
        prop_assert!((na.l1 - nb.l1).abs() <= 1e-12 * na.l1);
        prop_assert!((na.linf - nb.linf).abs() <= 1e-12);
        prop_assert!((na.grad_linf - nb.grad_linf).abs() <= 1e-9 * na.grad_linf);
    }

    #[test]
    fn swap_is_a_coordinate_reflection(m in 1u32..5, n in 1u32..5, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let a = EigenfunctionModel::torus(m, n).unwrap();
        let b = EigenfunctionModel::torus(n, m).unwrap();
        prop_assert!((a.value([x, y]) - b.value([y, x])).abs() < 1e-12);
    }
}
