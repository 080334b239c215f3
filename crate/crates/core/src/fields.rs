//! Analytic eigenfunction models with exact values, gradients and eigenvalues.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::nodal::Region;
use crate::special::{bessel_j, bessel_j_prime, bessel_j_zero};

/// A smooth function on the plane with an exact gradient.
pub trait PlanarFunction: Sync {
    fn value(&self, p: [f64; 2]) -> f64;
    fn gradient(&self, p: [f64; 2]) -> [f64; 2];
}

/// Wraps a closure as a [`PlanarFunction`]. The gradient is a central difference,
/// so this is meant for test data and synthetic fields rather than models.
#[derive(Debug, Clone, Copy)]
pub struct FnField<F>(pub F);

impl<F: Fn([f64; 2]) -> f64 + Sync> PlanarFunction for FnField<F> {
    fn value(&self, p: [f64; 2]) -> f64 {
        (self.0)(p)
    }

    fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        let e = 1e-6;
        [
            ((self.0)([p[0] + e, p[1]]) - (self.0)([p[0] - e, p[1]])) / (2.0 * e),
            ((self.0)([p[0], p[1] + e]) - (self.0)([p[0], p[1] - e])) / (2.0 * e),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    TorusProduct,
    RectangleDirichlet,
    DiskBessel,
    ConeHarmonic,
}

/// Closed-form Laplacian eigenfunctions (and the harmonic cone model).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenfunctionModel {
    /// `sin(2πmx) sin(2πny)` on the unit torus.
    TorusProduct { m: u32, n: u32 },
    /// `sin(mπx/a) sin(nπy/b)` on `[0,a] × [0,b]` with Dirichlet walls.
    RectangleDirichlet { m: u32, n: u32, a: f64, b: f64 },
    /// `J_m(j_{m,k} r / R) cos(mθ)` on the disk of radius `R` centred at the origin.
    DiskBessel { angular: u32, radial: u32, radius: f64, zero: f64 },
    /// `Re((x + iy)^k)`: harmonic, vanishing to order `k` at the origin.
    ConeHarmonic { order: u32 },
}

impl EigenfunctionModel {
    pub fn torus(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(invalid(format!("torus mode indices must be positive, got ({m}, {n})")));
        }
        Ok(Self::TorusProduct { m, n })
    }

    pub fn rectangle(m: u32, n: u32, a: f64, b: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(invalid(format!("rectangle mode indices must be positive, got ({m}, {n})")));
        }
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(invalid(format!("rectangle sides must be positive, got {a} x {b}")));
        }
        Ok(Self::RectangleDirichlet { m, n, a, b })
    }

    pub fn disk(angular: u32, radial: u32, radius: f64) -> Result<Self> {
        if radial == 0 {
            return Err(invalid("disk radial index must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self::DiskBessel { angular, radial, radius, zero: bessel_j_zero(angular, radial) })
    }

    pub fn cone(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(invalid("cone order must be at least 1"));
        }
        Ok(Self::ConeHarmonic { order })
    }

    /// Parses `kind:p1,p2,...`, e.g. `torus:1,1`, `rect:1,1,1,1`, `disk:0,1,1`, `cone:2`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, params) = spec
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("model `{spec}` is not of the form kind:params")))?;
        let nums: Vec<&str> = params.split(',').map(str::trim).collect();
        let int = |k: usize| -> Result<u32> {
            nums.get(k)
                .ok_or_else(|| Error::Config(format!("model `{spec}` is missing parameter {}", k + 1)))?
                .parse::<u32>()
                .map_err(|e| Error::Config(format!("model `{spec}`: {e}")))
        };
        let real = |k: usize, default: f64| -> Result<f64> {
            match nums.get(k) {
                None => Ok(default),
                Some(s) => s.parse::<f64>().map_err(|e| Error::Config(format!("model `{spec}`: {e}"))),
            }
        };
        match kind.trim() {
            "torus" => Self::torus(int(0)?, int(1)?),
            "rect" | "rectangle" => Self::rectangle(int(0)?, int(1)?, real(2, 1.0)?, real(3, 1.0)?),
            "disk" => Self::disk(int(0)?, int(1)?, real(2, 1.0)?),
            "cone" => Self::cone(int(0)?),
            other => Err(Error::Config(format!(
                "unknown model kind `{other}` (expected torus, rect, disk or cone)"
            ))),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Self::TorusProduct { .. } => ModelKind::TorusProduct,
            Self::RectangleDirichlet { .. } => ModelKind::RectangleDirichlet,
            Self::DiskBessel { .. } => ModelKind::DiskBessel,
            Self::ConeHarmonic { .. } => ModelKind::ConeHarmonic,
        }
    }

    /// `λ` with `−Δu = λu`; zero for the harmonic cone model.
    pub fn eigenvalue(&self) -> f64 {
        match *self {
            Self::TorusProduct { m, n } => 4.0 * PI * PI * (m as f64).powi(2) + 4.0 * PI * PI * (n as f64).powi(2),
            Self::RectangleDirichlet { m, n, a, b } => {
                PI * PI * ((m as f64 / a).powi(2) + (n as f64 / b).powi(2))
            }
            Self::DiskBessel { radius, zero, .. } => (zero / radius).powi(2),
            Self::ConeHarmonic { .. } => 0.0,
        }
    }

    /// Order of vanishing at the apex for the cone model.
    pub fn vanishing_order(&self) -> Option<u32> {
        match *self {
            Self::ConeHarmonic { order } => Some(order),
            _ => None,
        }
    }

    /// The grid the model naturally lives on, with `cells_per_unit` cells per unit length.
    pub fn natural_grid(&self, cells_per_unit: usize) -> Result<GridSpec> {
        match *self {
            Self::TorusProduct { .. } => Ok(GridSpec::unit_torus(cells_per_unit)),
            Self::RectangleDirichlet { a, b, .. } => GridSpec::rectangle(a, b, cells_per_unit),
            Self::DiskBessel { radius, .. } => {
                let n = ((2.0 * radius * cells_per_unit as f64).round() as usize).max(2);
                GridSpec::new(n, n, [-radius, -radius], [2.0 * radius, 2.0 * radius], [false, false])
            }
            Self::ConeHarmonic { .. } => {
                let n = (2 * cells_per_unit).max(2);
                GridSpec::new(n, n, [-1.0, -1.0], [2.0, 2.0], [false, false])
            }
        }
    }

    /// Whether `p` belongs to the model's physical domain (the disk for Bessel modes).
    pub fn in_support(&self, p: [f64; 2]) -> bool {
        match *self {
            Self::DiskBessel { radius, .. } => p[0].hypot(p[1]) < radius,
            _ => true,
        }
    }
}

impl PlanarFunction for EigenfunctionModel {
    fn value(&self, p: [f64; 2]) -> f64 {
        let [x, y] = p;
        match *self {
            Self::TorusProduct { m, n } => {
                (2.0 * PI * m as f64 * x).sin() * (2.0 * PI * n as f64 * y).sin()
            }
            Self::RectangleDirichlet { m, n, a, b } => {
                (m as f64 * PI * x / a).sin() * (n as f64 * PI * y / b).sin()
            }
            Self::DiskBessel { angular, radius, zero, .. } => {
                let r = x.hypot(y);
                let theta = y.atan2(x);
                bessel_j(angular as i32, zero * r / radius) * (angular as f64 * theta).cos()
            }
            Self::ConeHarmonic { order } => Complex64::new(x, y).powu(order).re,
        }
    }

    fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        let [x, y] = p;
        match *self {
            Self::TorusProduct { m, n } => {
                let (km, kn) = (2.0 * PI * m as f64, 2.0 * PI * n as f64);
                [
                    km * (km * x).cos() * (kn * y).sin(),
                    kn * (km * x).sin() * (kn * y).cos(),
                ]
            }
            Self::RectangleDirichlet { m, n, a, b } => {
                let (km, kn) = (m as f64 * PI / a, n as f64 * PI / b);
                [
                    km * (km * x).cos() * (kn * y).sin(),
                    kn * (km * x).sin() * (kn * y).cos(),
                ]
            }
            Self::DiskBessel { angular, radius, zero, .. } => {
                let k = zero / radius;
                let r = x.hypot(y);
                let order = angular as i32;
                if r < 1e-12 {
                    return if angular == 1 { [0.5 * k, 0.0] } else { [0.0, 0.0] };
                }
                let theta = y.atan2(x);
                let mth = angular as f64 * theta;
                let dr = k * bessel_j_prime(order, k * r) * mth.cos();
                let dtheta_over_r = -(angular as f64) * bessel_j(order, k * r) * mth.sin() / r;
                let (c, s) = (theta.cos(), theta.sin());
                [dr * c - dtheta_over_r * s, dr * s + dtheta_over_r * c]
            }
            Self::ConeHarmonic { order } => {
                if order == 1 {
                    return [1.0, 0.0];
                }
                let d = Complex64::new(x, y).powu(order - 1) * order as f64;
                [d.re, -d.im]
            }
        }
    }
}

impl fmt::Display for EigenfunctionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::TorusProduct { m, n } => write!(f, "torus:{m},{n}"),
            Self::RectangleDirichlet { m, n, a, b } => write!(f, "rect:{m},{n},{a},{b}"),
            Self::DiskBessel { angular, radial, radius, .. } => write!(f, "disk:{angular},{radial},{radius}"),
            Self::ConeHarmonic { order } => write!(f, "cone:{order}"),
        }
    }
}

/// Norms of a function restricted to a domain, as grid sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBundle {
    /// Midpoint-rule `∫|u|`.
    pub l1: f64,
    pub linf: f64,
    pub grad_linf: f64,
}

/// Midpoint-rule and grid-supremum norms of `f` over the cells of `region`.
pub fn compute_norms(f: &dyn PlanarFunction, region: &Region<'_>) -> Result<NormBundle> {
    let grid = region.grid();
    let mut l1 = 0.0;
    let mut linf = 0.0_f64;
    let mut grad_linf = 0.0_f64;
    let mut count = 0usize;
    for (i, j) in region.cells() {
        let p = grid.center(i, j);
        let v = f.value(p).abs();
        let g = f.gradient(p);
        l1 += v;
        linf = linf.max(v);
        grad_linf = grad_linf.max(g[0].hypot(g[1]));
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyDomain);
    }
    Ok(NormBundle { l1: l1 * grid.cell_area(), linf, grad_linf })
}

/// Samples `f` at the cell centers of `grid`.
pub fn sample_field(f: &dyn PlanarFunction, grid: GridSpec) -> ScalarField {
    ScalarField::from_fn(grid, |p| f.value(p))
}

/// A note for reports when the grid has fewer than ten cells per wavelength.
pub fn sampling_warning(model: &EigenfunctionModel, grid: &GridSpec) -> Option<String> {
    let lambda = model.eigenvalue();
    (!grid.resolves_wavelength(lambda)).then(|| {
        format!(
            "grid spacing {:.4e} exceeds a tenth of the wavelength {:.4e} for {model}",
            grid.h,
            2.0 * PI / lambda.sqrt()
        )
    })
}

/// Largest `|Δ_h u + λu|` over cells whose full 5-point stencil lies inside the grid.
pub fn eigen_residual(model: &EigenfunctionModel, grid: &GridSpec) -> f64 {
    let field = sample_field(model, *grid);
    let lambda = model.eigenvalue();
    let h2 = grid.h * grid.h;
    let mut worst = 0.0_f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let nb: Option<Vec<(usize, usize)>> = (0..4).map(|d| grid.neighbor(i, j, d)).collect();
            let Some(nb) = nb else { continue };
            let c = field.get(i, j);
            let lap = nb.iter().map(|&(a, b)| field.get(a, b)).sum::<f64>() - 4.0 * c;
            worst = worst.max((lap / h2 + lambda * c).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodal::label_nodal_domains;

    #[test]
    fn torus_eigenvalue_and_peak() {
        let u = EigenfunctionModel::torus(1, 1).unwrap();
        assert!((u.eigenvalue() - 8.0 * PI * PI).abs() < 1e-12);
        assert!((u.eigenvalue() - 78.956_835_208_714_86).abs() < 1e-9);
        assert!((u.value([0.25, 0.25]) - 1.0).abs() < 1e-15);
        assert!((EigenfunctionModel::torus(2, 3).unwrap().eigenvalue() - 52.0 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn invalid_parameters() {
        assert!(EigenfunctionModel::torus(0, 1).is_err());
        assert!(EigenfunctionModel::rectangle(1, 1, 0.0, 1.0).is_err());
        assert!(EigenfunctionModel::rectangle(1, 1, 1.0, -2.0).is_err());
        assert!(EigenfunctionModel::cone(0).is_err());
        assert!(EigenfunctionModel::parse("sphere:1").is_err());
        assert!(EigenfunctionModel::parse("torus:1").is_err());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["torus:2,3", "rect:1,1,1,1", "cone:4", "disk:1,2,1"] {
            let m = EigenfunctionModel::parse(s).unwrap();
            assert_eq!(EigenfunctionModel::parse(&m.to_string()).unwrap(), m);
        }
        assert_eq!(
            EigenfunctionModel::parse("rect:2,1").unwrap(),
            EigenfunctionModel::rectangle(2, 1, 1.0, 1.0).unwrap()
        );
    }

    #[test]
    fn cone_model_closed_forms() {
        let k1 = EigenfunctionModel::cone(1).unwrap();
        assert_eq!(k1.value([0.3, -2.0]), 0.3);
        let k2 = EigenfunctionModel::cone(2).unwrap();
        assert!((k2.value([0.7, 0.2]) - (0.49 - 0.04)).abs() < 1e-15);
        let k8 = EigenfunctionModel::cone(8).unwrap();
        assert!((k8.value([0.5, 0.0]) - 0.5_f64.powi(8)).abs() < 1e-18);
        assert_eq!(k8.eigenvalue(), 0.0);
        assert_eq!(k8.vanishing_order(), Some(8));
    }

    #[test]
    fn rectangle_norms_match_closed_forms() {
        let u = EigenfunctionModel::rectangle(1, 1, 1.0, 1.0).unwrap();
        let grid = u.natural_grid(256).unwrap();
        let mask = label_nodal_domains(&sample_field(&u, grid));
        assert_eq!(mask.label_count(), 1);
        let norms = compute_norms(&u, &mask.region(1).unwrap()).unwrap();
        // ∫₀¹ sin(πx) dx = 2/π.
        assert!((norms.l1 - 4.0 / (PI * PI)).abs() < 1e-4);
        assert!((norms.linf - 1.0).abs() < 1e-4);
        // Gradient peaks at the wall midpoints; the nearest centres sit h/2 inside.
        assert!((norms.grad_linf - PI).abs() < 1e-3);
    }

    #[test]
    fn torus_quarter_domain_norms() {
        let u = EigenfunctionModel::torus(1, 1).unwrap();
        let mask = label_nodal_domains(&sample_field(&u, GridSpec::unit_torus(256)));
        assert_eq!(mask.label_count(), 4);
        for label in 1..=4 {
            let norms = compute_norms(&u, &mask.region(label).unwrap()).unwrap();
            assert!((norms.l1 - 1.0 / (PI * PI)).abs() < 1e-5, "{}", norms.l1);
            // Nearest centres are h/2 off the peak: 1 - cos²(πh) ≈ (πh)².
            assert!((norms.linf - 1.0).abs() < 1e-3);
            assert!((norms.grad_linf - 2.0 * PI).abs() < 1e-2);
            assert!(norms.l1 <= norms.linf * mask.area(label).unwrap());
        }
    }

    #[test]
    fn swapped_torus_modes_have_equal_norms() {
        let grid = GridSpec::unit_torus(96);
        let a = EigenfunctionModel::torus(1, 2).unwrap();
        let b = EigenfunctionModel::torus(2, 1).unwrap();
        let ma = label_nodal_domains(&sample_field(&a, grid));
        let mb = label_nodal_domains(&sample_field(&b, grid));
        let total = |u: &EigenfunctionModel, m: &crate::nodal::DomainMask| {
            (1..=m.label_count() as u32)
                .map(|l| compute_norms(u, &m.region(l).unwrap()).unwrap().l1)
                .sum::<f64>()
        };
        assert!((total(&a, &ma) - total(&b, &mb)).abs() < 1e-12);
    }

    #[test]
    fn eigen_residual_is_second_order() {
        for model in [
            EigenfunctionModel::torus(2, 3).unwrap(),
            EigenfunctionModel::rectangle(2, 1, 1.0, 0.5).unwrap(),
        ] {
            let coarse = eigen_residual(&model, &model.natural_grid(64).unwrap());
            let fine = eigen_residual(&model, &model.natural_grid(128).unwrap());
            let lambda = model.eigenvalue();
            let h = 1.0 / 64.0;
            assert!(coarse <= h * h * lambda * lambda, "{coarse}");
            let ratio = coarse / fine;
            assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn disk_mode_satisfies_eigen_equation() {
        let model = EigenfunctionModel::disk(1, 1, 1.0).unwrap();
        let lambda = model.eigenvalue();
        assert!((lambda - 3.831_705_970_207_512_f64.powi(2)).abs() < 1e-9);
        let e = 1e-4;
        for p in [[0.3, 0.2], [-0.5, 0.1], [0.05, -0.6]] {
            let c = model.value(p);
            let lap = model.value([p[0] + e, p[1]])
                + model.value([p[0] - e, p[1]])
                + model.value([p[0], p[1] + e])
                + model.value([p[0], p[1] - e])
                - 4.0 * c;
            assert!((lap / (e * e) + lambda * c).abs() < 1e-4);
        }
        // Vanishes on the circle.
        assert!(model.value([0.6, 0.8]).abs() < 1e-12);
    }

    #[test]
    fn gradients_match_central_differences() {
        let models = [
            EigenfunctionModel::torus(2, 3).unwrap(),
            EigenfunctionModel::rectangle(1, 2, 1.0, 2.0).unwrap(),
            EigenfunctionModel::disk(2, 1, 1.0).unwrap(),
            EigenfunctionModel::cone(3).unwrap(),
        ];
        let e = 1e-5;
        for m in &models {
            for p in [[0.31, 0.47], [0.12, 0.66], [0.43, 0.05]] {
                let g = m.gradient(p);
                let fx = (m.value([p[0] + e, p[1]]) - m.value([p[0] - e, p[1]])) / (2.0 * e);
                let fy = (m.value([p[0], p[1] + e]) - m.value([p[0], p[1] - e])) / (2.0 * e);
                let scale = 1.0 + g[0].hypot(g[1]);
                assert!((g[0] - fx).abs() < 1e-6 * scale && (g[1] - fy).abs() < 1e-6 * scale, "{m}");
            }
        }
    }
}
