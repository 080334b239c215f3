//! Regular square-cell grids and cell-centered scalar fields.

use crate::error::{invalid, Result};

/// A regular grid of square cells over an axis-aligned rectangle.
///
/// Samples live at cell centers. Periodic axes wrap; non-periodic axes are
/// bounded by walls at the rectangle edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub origin: [f64; 2],
    pub h: f64,
    pub periodic_x: bool,
    pub periodic_y: bool,
}

impl GridSpec {
    pub fn new(
        nx: usize,
        ny: usize,
        origin: [f64; 2],
        extent: [f64; 2],
        periodic: [bool; 2],
    ) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(invalid("grid needs at least one cell per axis"));
        }
        if !(extent[0] > 0.0 && extent[1] > 0.0 && extent[0].is_finite() && extent[1].is_finite()) {
            return Err(invalid(format!("grid extent must be positive, got {extent:?}")));
        }
        let hx = extent[0] / nx as f64;
        let hy = extent[1] / ny as f64;
        if (hx - hy).abs() > 1e-9 * hx {
            return Err(invalid(format!("cells must be square (hx = {hx}, hy = {hy})")));
        }
        Ok(Self { nx, ny, origin, h: hx, periodic_x: periodic[0], periodic_y: periodic[1] })
    }

    /// The unit torus `[0,1)²` with `n × n` cells.
    pub fn unit_torus(n: usize) -> Self {
        let n = n.max(1);
        Self { nx: n, ny: n, origin: [0.0, 0.0], h: 1.0 / n as f64, periodic_x: true, periodic_y: true }
    }

    /// The box `[0,a] × [0,b]` with walls, `cells_per_unit` cells per unit length.
    pub fn rectangle(a: f64, b: f64, cells_per_unit: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(invalid(format!("rectangle sides must be positive, got {a} x {b}")));
        }
        let nx = (a * cells_per_unit as f64).round() as usize;
        let ny = (b * cells_per_unit as f64).round() as usize;
        Self::new(nx.max(1), ny.max(1), [0.0, 0.0], [a, b], [false, false])
    }

    pub fn extent(&self) -> [f64; 2] {
        [self.nx as f64 * self.h, self.ny as f64 * self.h]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn periodic(&self) -> [bool; 2] {
        [self.periodic_x, self.periodic_y]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    pub fn area(&self) -> f64 {
        self.len() as f64 * self.cell_area()
    }

    /// Wraps periodic coordinates into `[origin, origin + extent)`.
    #[inline]
    pub fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        let ext = self.extent();
        let mut q = p;
        if self.periodic_x {
            q[0] = self.origin[0] + wrap_offset(p[0] - self.origin[0], ext[0]);
        }
        if self.periodic_y {
            q[1] = self.origin[1] + wrap_offset(p[1] - self.origin[1], ext[1]);
        }
        q
    }

    /// Whether `p` lies within the grid rectangle (always true on periodic axes).
    #[inline]
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let ext = self.extent();
        (self.periodic_x || (p[0] >= self.origin[0] && p[0] <= self.origin[0] + ext[0]))
            && (self.periodic_y || (p[1] >= self.origin[1] && p[1] <= self.origin[1] + ext[1]))
    }

    /// Cell containing `p`, after periodic wrapping.
    pub fn cell_at(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        if !self.contains(p) {
            return None;
        }
        let q = self.wrap(p);
        let fi = ((q[0] - self.origin[0]) / self.h).floor();
        let fj = ((q[1] - self.origin[1]) / self.h).floor();
        let i = (fi.max(0.0) as usize).min(self.nx - 1);
        let j = (fj.max(0.0) as usize).min(self.ny - 1);
        Some((i, j))
    }

    /// 4-neighbour of `(i, j)` in direction `dir` (0: +x, 1: -x, 2: +y, 3: -y), wrapping
    /// periodic axes; `None` across a wall.
    #[inline]
    pub fn neighbor(&self, i: usize, j: usize, dir: usize) -> Option<(usize, usize)> {
        match dir {
            0 => {
                if i + 1 < self.nx {
                    Some((i + 1, j))
                } else if self.periodic_x {
                    Some((0, j))
                } else {
                    None
                }
            }
            1 => {
                if i > 0 {
                    Some((i - 1, j))
                } else if self.periodic_x {
                    Some((self.nx - 1, j))
                } else {
                    None
                }
            }
            2 => {
                if j + 1 < self.ny {
                    Some((i, j + 1))
                } else if self.periodic_y {
                    Some((i, 0))
                } else {
                    None
                }
            }
            _ => {
                if j > 0 {
                    Some((i, j - 1))
                } else if self.periodic_y {
                    Some((i, self.ny - 1))
                } else {
                    None
                }
            }
        }
    }

    /// At least ten cells per wavelength `2π/√λ`.
    pub fn resolves_wavelength(&self, lambda: f64) -> bool {
        lambda <= 0.0 || self.h <= 2.0 * std::f64::consts::PI / lambda.sqrt() / 10.0
    }

    /// Shortest displacement from `a` to `b`, using minimum images on periodic axes.
    #[inline]
    pub fn displacement(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let ext = self.extent();
        let mut d = [b[0] - a[0], b[1] - a[1]];
        if self.periodic_x {
            d[0] -= ext[0] * (d[0] / ext[0]).round();
        }
        if self.periodic_y {
            d[1] -= ext[1] * (d[1] / ext[1]).round();
        }
        d
    }
}

/// `x mod period` in `[0, period)`. Points one period out are common on paths and
/// avoid the slow remainder.
#[inline]
fn wrap_offset(x: f64, period: f64) -> f64 {
    if (0.0..period).contains(&x) {
        x
    } else if (-period..0.0).contains(&x) && x + period < period {
        x + period
    } else if (period..2.0 * period).contains(&x) {
        x - period
    } else {
        x.rem_euclid(period)
    }
}

/// Samples of a function at the cell centers of a grid, stored row-major (`j * nx + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "field has {} values, grid has {} cells",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite field value at index {bad}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 2]) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values.push(f(grid.center(i, j)));
            }
        }
        Self { grid, values }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }
}
