//! Exact Euclidean distance transform (lower envelope of parabolas).

use crate::error::{Error, Result};

use super::label::Region;

const FAR: f64 = 1e30;

/// Squared distance transform of one line: `d[q] = min_p (q - p)² + f[p]`.
pub(crate) fn edt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n == 0 {
        return d;
    }
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let sq = |x: usize| (x * x) as f64;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + sq(q)) - (f[p] + sq(p))) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for (q, dq) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let diff = q as f64 - p as f64;
        *dq = diff * diff + f[p];
    }
    d
}

fn transform_line(line: &[f64], periodic: bool) -> Vec<f64> {
    if !periodic {
        return edt_1d(line);
    }
    let n = line.len();
    let tripled: Vec<f64> = line.iter().chain(line).chain(line).copied().collect();
    edt_1d(&tripled)[n..2 * n].to_vec()
}

/// Squared distances (in cells) from each cell center to the nearest out-of-domain center.
/// Walls of non-periodic axes count as a ring of out cells.
pub(crate) fn squared_distance_cells(region: &Region<'_>) -> Result<Vec<f64>> {
    let grid = region.grid();
    let px = usize::from(!grid.periodic_x);
    let py = usize::from(!grid.periodic_y);
    let w = grid.nx + 2 * px;
    let hgt = grid.ny + 2 * py;
    let mut f = vec![0.0; w * hgt];
    let mut any_out = px + py > 0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let inside = region.contains_cell(i, j);
            any_out |= !inside;
            f[(j + py) * w + i + px] = if inside { FAR } else { 0.0 };
        }
    }
    if !any_out {
        return Err(Error::EmptyComplement);
    }
    for row in f.chunks_mut(w) {
        let t = transform_line(row, grid.periodic_x);
        row.copy_from_slice(&t);
    }
    let mut col = vec![0.0; hgt];
    for i in 0..w {
        for j in 0..hgt {
            col[j] = f[j * w + i];
        }
        let t = transform_line(&col, grid.periodic_y);
        for j in 0..hgt {
            f[j * w + i] = t[j];
        }
    }
    let mut out = vec![0.0; grid.len()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            out[grid.index(i, j)] = f[(j + py) * w + i + px];
        }
    }
    Ok(out)
}

/// Largest center-to-complement distance over the domain, less half a cell.
pub(crate) fn inradius(region: &Region<'_>) -> Result<f64> {
    let d2 = squared_distance_cells(region)?;
    let best = region.indices().into_iter().map(|idx| d2[idx]).fold(0.0_f64, f64::max);
    let h = region.grid().h;
    Ok(best.sqrt() * h - 0.5 * h)
}
