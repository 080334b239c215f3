//! Five-point Laplacian on a labeled domain with a symmetric Dirichlet closure.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::nodal::Region;
use crate::nodal::squared_distance_cells;

const NONE: u32 = u32::MAX;
const MIN_FRACTION: f64 = 0.01;

/// Laplacian restricted to the cells of one domain.
///
/// An out-of-domain neighbour at fractional distance `θh` (linear interpolation of the
/// level function; `θ = ½` at walls and on indicator masks) contributes `(g − u)/(θh²)`.
/// Interior couplings are `1/h²`, so the matrix is symmetric negative definite.
#[derive(Debug, Clone)]
pub struct HeatOperator {
    grid: GridSpec,
    /// Grid index of each unknown.
    cells: Vec<usize>,
    /// Unknown index per grid cell, `NONE` if not an unknown.
    slot: Vec<u32>,
    neighbors: Vec<[u32; 4]>,
    diag: Vec<f64>,
    /// Sum of `1/(θh²)` over boundary neighbours; multiplies the boundary value.
    boundary: Vec<f64>,
    inv_h2: f64,
}

impl HeatOperator {
    pub fn new(region: &Region<'_>) -> Result<Self> {
        Self::build(region, region.indices())
    }

    /// Restricts the unknowns to cells within `band` of the boundary. Deeper cells are
    /// held at zero, which is exact up to `erfc(band / 2√t)` for zero initial data.
    pub fn banded(region: &Region<'_>, band: f64) -> Result<Self> {
        let h = region.grid().h;
        let cells = match squared_distance_cells(region) {
            Ok(d2) => {
                let limit = (band / h).powi(2);
                region.indices().into_iter().filter(|&idx| d2[idx] <= limit).collect()
            }
            Err(_) => region.indices(),
        };
        Self::build(region, cells)
    }

    fn build(region: &Region<'_>, cells: Vec<usize>) -> Result<Self> {
        let grid = *region.grid();
        if cells.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut slot = vec![NONE; grid.len()];
        for (k, &idx) in cells.iter().enumerate() {
            slot[idx] = k as u32;
        }
        let inv_h2 = 1.0 / (grid.h * grid.h);
        let field = region.has_field();
        let mut neighbors = Vec::with_capacity(cells.len());
        let mut diag = Vec::with_capacity(cells.len());
        let mut boundary = Vec::with_capacity(cells.len());
        for &idx in &cells {
            let (i, j) = grid.coords(idx);
            let mut nb = [NONE; 4];
            let mut d = 0.0;
            let mut b = 0.0;
            for (dir, slot_dir) in nb.iter_mut().enumerate() {
                match grid.neighbor(i, j, dir) {
                    Some((a, c)) if slot[grid.index(a, c)] != NONE => {
                        *slot_dir = slot[grid.index(a, c)];
                        d -= inv_h2;
                    }
                    Some((a, c)) if region.contains_cell(a, c) => {
                        d -= inv_h2;
                    }
                    Some((a, c)) => {
                        let theta = if field {
                            let pin = region.level(idx);
                            let pout = region.level(grid.index(a, c));
                            (pin / (pin - pout)).max(MIN_FRACTION)
                        } else {
                            0.5
                        };
                        d -= inv_h2 / theta;
                        b += inv_h2 / theta;
                    }
                    None => {
                        d -= 2.0 * inv_h2;
                        b += 2.0 * inv_h2;
                    }
                }
            }
            neighbors.push(nb);
            diag.push(d);
            boundary.push(b);
        }
        Ok(Self { grid, cells, slot, neighbors, diag, boundary, inv_h2 })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Grid indices of the unknowns, in raster order.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// `y = A x` (homogeneous part).
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for k in 0..x.len() {
            let nb = &self.neighbors[k];
            let mut s = 0.0;
            for &n in nb {
                if n != NONE {
                    s += x[n as usize];
                }
            }
            y[k] = s * self.inv_h2 + self.diag[k] * x[k];
        }
    }

    /// `y = (I − c A) x`, returning `x · y`.
    pub(crate) fn apply_shifted(&self, c: f64, x: &[f64], y: &mut [f64]) -> f64 {
        let off = c * self.inv_h2;
        let mut dot = 0.0;
        for k in 0..x.len() {
            let nb = &self.neighbors[k];
            let mut s = 0.0;
            for &n in nb {
                if n != NONE {
                    s += x[n as usize];
                }
            }
            let v = x[k] * (1.0 - c * self.diag[k]) - off * s;
            y[k] = v;
            dot += x[k] * v;
        }
        dot
    }

    /// Coefficients of the boundary value in `A u + b g`.
    pub fn boundary_weights(&self) -> &[f64] {
        &self.boundary
    }

    pub(crate) fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Gathers grid samples onto the unknowns.
    pub fn restrict(&self, values: &[f64]) -> Vec<f64> {
        self.cells.iter().map(|&idx| values[idx]).collect()
    }

    #[inline]
    pub fn is_unknown(&self, idx: usize) -> bool {
        self.slot[idx] != NONE
    }

    /// Scatters unknowns to a full grid, filling other cells with `outside`.
    pub fn extend(&self, x: &[f64], outside: f64) -> Vec<f64> {
        let mut out = vec![outside; self.grid.len()];
        for (k, &idx) in self.cells.iter().enumerate() {
            out[idx] = x[k];
        }
        out
    }
}
