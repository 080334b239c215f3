//! Absorbing domains for Brownian paths.

use std::f64::consts::PI;

use crate::grid::GridSpec;
use crate::nodal::Region;

/// A planar region whose boundary kills Brownian paths.
pub trait KillingDomain: Sync {
    fn contains(&self, p: [f64; 2]) -> bool;

    /// Distance to the boundary, exact or from a locally planar model.
    fn boundary_distance(&self, p: [f64; 2]) -> f64;

    /// Boundary distance at `p` if `p` is inside, in one evaluation where possible.
    fn probe(&self, p: [f64; 2]) -> Option<f64> {
        self.contains(p).then(|| self.boundary_distance(p))
    }

    /// Maps a point into the fundamental domain on periodic geometries.
    fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        p
    }

    /// Paths reaching a point where this holds stop and count as survivors.
    fn stops(&self, _p: [f64; 2]) -> bool {
        false
    }

    /// Whether the straight step from `a` to `b` passes through excluded points
    /// that the endpoint test would miss.
    fn step_crosses(&self, _a: [f64; 2], _b: [f64; 2]) -> bool {
        false
    }
}

/// `{ p : n·p < offset }` for a unit normal `n`.
#[derive(Debug, Clone, Copy)]
pub struct HalfPlane {
    pub normal: [f64; 2],
    pub offset: f64,
}

impl HalfPlane {
    /// The half-plane `x < a`.
    pub fn below_x(a: f64) -> Self {
        Self { normal: [1.0, 0.0], offset: a }
    }
}

impl KillingDomain for HalfPlane {
    fn contains(&self, p: [f64; 2]) -> bool {
        self.boundary_distance(p) > 0.0
    }

    fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        self.offset - (self.normal[0] * p[0] + self.normal[1] * p[1])
    }
}

/// The straight strip `0 < y < width`, unbounded in x.
#[derive(Debug, Clone, Copy)]
pub struct Corridor {
    pub width: f64,
}

impl KillingDomain for Corridor {
    fn contains(&self, p: [f64; 2]) -> bool {
        p[1] > 0.0 && p[1] < self.width
    }

    fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        p[1].min(self.width - p[1])
    }
}

/// Open neighbourhood of a segment on a (possibly periodic) grid geometry.
#[derive(Debug, Clone, Copy)]
pub struct Tube {
    pub grid: GridSpec,
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub half_width: f64,
}

impl Tube {
    /// Distance from `p` to the segment, minimised over neighbouring periodic images.
    pub fn distance_to_axis(&self, p: [f64; 2]) -> f64 {
        let d0 = self.grid.displacement(self.a, p);
        let ab = [self.b[0] - self.a[0], self.b[1] - self.a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let ext = self.grid.extent();
        let sx: &[f64] = if self.grid.periodic_x { &[-1.0, 0.0, 1.0] } else { &[0.0] };
        let sy: &[f64] = if self.grid.periodic_y { &[-1.0, 0.0, 1.0] } else { &[0.0] };
        let mut best = f64::INFINITY;
        for &kx in sx {
            for &ky in sy {
                let d = [d0[0] + kx * ext[0], d0[1] + ky * ext[1]];
                let s = if len2 > 0.0 { ((d[0] * ab[0] + d[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
                best = best.min((d[0] - s * ab[0]).hypot(d[1] - s * ab[1]));
            }
        }
        best
    }
}

impl KillingDomain for Tube {
    fn contains(&self, p: [f64; 2]) -> bool {
        self.boundary_distance(p) > 0.0
    }

    fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        self.half_width - self.distance_to_axis(p)
    }

    fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        self.grid.wrap(p)
    }
}

/// The wedge `|θ| < α/2` with apex at the origin, stopped on the circle of radius `r`.
#[derive(Debug, Clone, Copy)]
pub struct Wedge {
    pub alpha: f64,
    pub stop_radius: f64,
}

impl KillingDomain for Wedge {
    fn contains(&self, p: [f64; 2]) -> bool {
        p[1].atan2(p[0]).abs() < 0.5 * self.alpha
    }

    fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        let rho = p[0].hypot(p[1]);
        let gap = 0.5 * self.alpha - p[1].atan2(p[0]).abs();
        rho * gap.min(0.5 * PI).sin()
    }

    fn stops(&self, p: [f64; 2]) -> bool {
        p[0].hypot(p[1]) >= self.stop_radius
    }

    fn step_crosses(&self, a: [f64; 2], b: [f64; 2]) -> bool {
        // The ray θ = π is always excluded; a step may jump over it.
        if (a[1] > 0.0) == (b[1] > 0.0) {
            return false;
        }
        let s = a[1] / (a[1] - b[1]);
        a[0] + s * (b[0] - a[0]) <= 0.0
    }
}

/// A labeled grid domain. The level function is interpolated bilinearly between cell
/// centers, held constant in the half cells next to walls, and walls kill.
pub struct RegionDomain {
    grid: GridSpec,
    level: Vec<f64>,
}

impl RegionDomain {
    pub fn new(region: &Region<'_>) -> Self {
        Self { grid: *region.grid(), level: region.level_values() }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Lower-left corner cell, fractional offsets, and the four corner indices.
    #[inline]
    fn locate(&self, p: [f64; 2]) -> ([usize; 4], f64, f64) {
        let g = &self.grid;
        let axis = |x: f64, origin: f64, n: usize, periodic: bool| -> (usize, usize, f64) {
            let f = (x - origin) / g.h - 0.5;
            let k = f.floor();
            let frac = f - k;
            if periodic {
                let k = k as i64;
                let k0 = if k >= 0 && k < n as i64 { k } else if k == -1 { n as i64 - 1 } else { k.rem_euclid(n as i64) } as usize;
                (k0, (k0 + 1) % n, frac)
            } else if k < 0.0 {
                (0, 0, 0.0)
            } else if k as usize >= n - 1 {
                (n - 1, n - 1, 0.0)
            } else {
                (k as usize, k as usize + 1, frac)
            }
        };
        let (i0, i1, fx) = axis(p[0], g.origin[0], g.nx, g.periodic_x);
        let (j0, j1, fy) = axis(p[1], g.origin[1], g.ny, g.periodic_y);
        ([g.index(i0, j0), g.index(i1, j0), g.index(i1, j1), g.index(i0, j1)], fx, fy)
    }

    /// Bilinear level value and its gradient.
    #[inline]
    pub fn level_at(&self, p: [f64; 2]) -> (f64, [f64; 2]) {
        let (c, fx, fy) = self.locate(p);
        let v = c.map(|i| self.level[i]);
        let value = v[0] * (1.0 - fx) * (1.0 - fy) + v[1] * fx * (1.0 - fy) + v[2] * fx * fy + v[3] * (1.0 - fx) * fy;
        let gx = ((v[1] - v[0]) * (1.0 - fy) + (v[2] - v[3]) * fy) / self.grid.h;
        let gy = ((v[3] - v[0]) * (1.0 - fx) + (v[2] - v[1]) * fx) / self.grid.h;
        (value, [gx, gy])
    }

    fn wall_distance(&self, p: [f64; 2]) -> f64 {
        let g = &self.grid;
        let ext = g.extent();
        let mut d = f64::INFINITY;
        if !g.periodic_x {
            d = d.min(p[0] - g.origin[0]).min(g.origin[0] + ext[0] - p[0]);
        }
        if !g.periodic_y {
            d = d.min(p[1] - g.origin[1]).min(g.origin[1] + ext[1] - p[1]);
        }
        d
    }
}

impl KillingDomain for RegionDomain {
    fn contains(&self, p: [f64; 2]) -> bool {
        self.wall_distance(p) > 0.0 && self.level_at(p).0 > 0.0
    }

    fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        let (v, g) = self.level_at(p);
        let norm = g[0].hypot(g[1]);
        let planar = if norm > 0.0 { v / norm } else { f64::INFINITY };
        planar.min(self.wall_distance(p))
    }

    fn probe(&self, p: [f64; 2]) -> Option<f64> {
        let wall = self.wall_distance(p);
        if wall <= 0.0 {
            return None;
        }
        let (v, g) = self.level_at(p);
        if v <= 0.0 {
            return None;
        }
        let norm = (g[0] * g[0] + g[1] * g[1]).sqrt();
        Some(if norm > 0.0 { (v / norm).min(wall) } else { wall })
    }

    fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        self.grid.wrap(p)
    }
}
