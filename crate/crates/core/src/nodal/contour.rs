//! Marching squares on the dual lattice of cell centers.

use std::collections::HashMap;

use crate::grid::{GridSpec, ScalarField};

/// Subdivision used inside saddle cells; odd so that sub-nodes avoid the symmetry lines.
const SADDLE_SUBDIVISION: usize = 9;

/// Relative size of the shift applied to exact zeros.
pub const ZERO_SHIFT: f64 = 1e-12;

/// Zero set of the bilinear interpolant of a sampled field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodalSet {
    /// Chains of points in plane coordinates. On periodic grids a chain may leave the
    /// fundamental domain; it is continuous rather than wrapped.
    pub polylines: Vec<Vec<[f64; 2]>>,
    /// Sum of segment lengths.
    pub total_length: f64,
    pub segment_count: usize,
    /// Number of exact zeros shifted before contouring.
    pub perturbed_zeros: usize,
    /// Centers of dual cells with four sign changes (near-singular points of the zero set).
    pub saddle_points: Vec<[f64; 2]>,
}

/// How non-periodic axes are padded with nodes on the walls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Padding {
    /// Linear extrapolation from the two nearest centers.
    Extrapolate,
    /// A fixed value on every wall node.
    Wall(f64),
}

/// Replaces exact zeros by `ZERO_SHIFT * max|v|`. Returns the shifted copy and the count.
pub(crate) fn perturb_zeros(values: &[f64]) -> (Vec<f64>, usize) {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return (values.to_vec(), 0);
    }
    let shift = ZERO_SHIFT * scale;
    let mut count = 0;
    let out = values
        .iter()
        .map(|&v| {
            if v == 0.0 {
                count += 1;
                shift
            } else {
                v
            }
        })
        .collect();
    (out, count)
}

/// Node values on the lattice of cell centers, padded with wall nodes on non-periodic axes.
pub(crate) struct DualLattice {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<f64>,
    periodic: [bool; 2],
    extent: [f64; 2],
}

impl DualLattice {
    pub(crate) fn new(grid: &GridSpec, values: &[f64], padding: Padding) -> Self {
        let axis = |n: usize, origin: f64, periodic: bool| -> Vec<f64> {
            let mut v = Vec::with_capacity(n + 2);
            if !periodic {
                v.push(origin);
            }
            v.extend((0..n).map(|i| origin + (i as f64 + 0.5) * grid.h));
            if !periodic {
                v.push(origin + n as f64 * grid.h);
            }
            v
        };
        let xs = axis(grid.nx, grid.origin[0], grid.periodic_x);
        let ys = axis(grid.ny, grid.origin[1], grid.periodic_y);
        let (mx, my) = (xs.len(), ys.len());
        let ox = usize::from(!grid.periodic_x);
        let oy = usize::from(!grid.periodic_y);
        let mut out = vec![f64::NAN; mx * my];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                out[(j + oy) * mx + i + ox] = values[grid.index(i, j)];
            }
        }
        let extrapolate = |a: f64, b: f64| 1.5 * a - 0.5 * b;
        match padding {
            Padding::Wall(w) => {
                for l in 0..my {
                    for k in 0..mx {
                        let wall_x = ox == 1 && (k == 0 || k == mx - 1);
                        let wall_y = oy == 1 && (l == 0 || l == my - 1);
                        if wall_x || wall_y {
                            out[l * mx + k] = w;
                        }
                    }
                }
            }
            Padding::Extrapolate => {
                if ox == 1 {
                    for l in oy..my - oy {
                        let r = l * mx;
                        out[r] = if mx > 3 { extrapolate(out[r + 1], out[r + 2]) } else { out[r + 1] };
                        out[r + mx - 1] =
                            if mx > 3 { extrapolate(out[r + mx - 2], out[r + mx - 3]) } else { out[r + mx - 2] };
                    }
                }
                if oy == 1 {
                    for k in 0..mx {
                        let (a, b) = (out[mx + k], out[2 * mx + k]);
                        out[k] = if my > 3 { extrapolate(a, b) } else { a };
                        let (a, b) = (out[(my - 2) * mx + k], out[(my - 3) * mx + k]);
                        out[(my - 1) * mx + k] = if my > 3 { extrapolate(a, b) } else { a };
                    }
                }
            }
        }
        Self { xs, ys, values: out, periodic: grid.periodic(), extent: grid.extent() }
    }

    fn cells(&self) -> (usize, usize) {
        let cx = if self.periodic[0] { self.xs.len() } else { self.xs.len() - 1 };
        let cy = if self.periodic[1] { self.ys.len() } else { self.ys.len() - 1 };
        (cx, cy)
    }

    /// Node index with wrap, plus the coordinate in the chart of the cell that asked.
    #[inline]
    fn x(&self, k: usize) -> (usize, f64) {
        let n = self.xs.len();
        if k < n {
            (k, self.xs[k])
        } else {
            (k - n, self.xs[k - n] + self.extent[0])
        }
    }

    #[inline]
    fn y(&self, l: usize) -> (usize, f64) {
        let n = self.ys.len();
        if l < n {
            (l, self.ys[l])
        } else {
            (l - n, self.ys[l - n] + self.extent[1])
        }
    }

    #[inline]
    fn value(&self, k: usize, l: usize) -> f64 {
        self.values[l * self.xs.len() + k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum VertexKey {
    /// Lattice edge from node `(k, l)` in +x (`horizontal`) or +y direction.
    Edge { horizontal: bool, k: usize, l: usize },
    /// Sub-edge inside the saddle cell `(k, l)`, starting at sub-node `(a, b)`.
    Sub { k: usize, l: usize, horizontal: bool, a: usize, b: usize },
}

#[derive(Debug, Clone, Copy)]
struct Vertex {
    key: VertexKey,
    p: [f64; 2],
}

#[inline]
fn crossing(va: f64, vb: f64, pa: [f64; 2], pb: [f64; 2]) -> [f64; 2] {
    let t = va / (va - vb);
    [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
}

/// Segments of one square with corner values `v` (c0 bottom-left, counter-clockwise).
/// `edge(e)` gives the crossing on edge `e` (e0 bottom, e1 right, e2 top, e3 left).
#[inline]
fn march(
    v: [f64; 4],
    center: impl FnOnce() -> f64,
    mut edge: impl FnMut(usize) -> Vertex,
    out: &mut Vec<(Vertex, Vertex)>,
) {
    let s = v.map(|x| x > 0.0);
    let cut = [s[0] != s[1], s[1] != s[2], s[2] != s[3], s[3] != s[0]];
    match cut.iter().filter(|&&c| c).count() {
        2 => {
            let mut it = (0..4).filter(|&e| cut[e]);
            let (a, b) = (it.next().unwrap(), it.next().unwrap());
            out.push((edge(a), edge(b)));
        }
        4 => {
            if (center() > 0.0) == s[0] {
                out.push((edge(0), edge(1)));
                out.push((edge(2), edge(3)));
            } else {
                out.push((edge(3), edge(0)));
                out.push((edge(1), edge(2)));
            }
        }
        _ => {}
    }
}

fn segments(lat: &DualLattice) -> (Vec<(Vertex, Vertex)>, Vec<[f64; 2]>) {
    let (cx, cy) = lat.cells();
    let mut segs = Vec::new();
    let mut saddles = Vec::new();
    for l in 0..cy {
        for k in 0..cx {
            let (k0, x0) = lat.x(k);
            let (k1, x1) = lat.x(k + 1);
            let (l0, y0) = lat.y(l);
            let (l1, y1) = lat.y(l + 1);
            let v = [lat.value(k0, l0), lat.value(k1, l0), lat.value(k1, l1), lat.value(k0, l1)];
            let p = [[x0, y0], [x1, y0], [x1, y1], [x0, y1]];
            let parent = |e: usize| -> Vertex {
                match e {
                    0 => Vertex { key: VertexKey::Edge { horizontal: true, k: k0, l: l0 }, p: crossing(v[0], v[1], p[0], p[1]) },
                    1 => Vertex { key: VertexKey::Edge { horizontal: false, k: k1, l: l0 }, p: crossing(v[1], v[2], p[1], p[2]) },
                    2 => Vertex { key: VertexKey::Edge { horizontal: true, k: k0, l: l1 }, p: crossing(v[3], v[2], p[3], p[2]) },
                    _ => Vertex { key: VertexKey::Edge { horizontal: false, k: k0, l: l0 }, p: crossing(v[0], v[3], p[0], p[3]) },
                }
            };
            let s = v.map(|x| x > 0.0);
            let saddle = s[0] == s[2] && s[1] == s[3] && s[0] != s[1];
            if !saddle {
                march(v, || 0.0, parent, &mut segs);
                continue;
            }
            saddles.push([0.5 * (x0 + x1), 0.5 * (y0 + y1)]);
            let n = SADDLE_SUBDIVISION;
            let bil = |a: f64, b: f64| {
                v[0] * (1.0 - a) * (1.0 - b) + v[1] * a * (1.0 - b) + v[2] * a * b + v[3] * (1.0 - a) * b
            };
            let node = |a: usize, b: usize| bil(a as f64 / n as f64, b as f64 / n as f64);
            let pos = |a: usize, b: usize| {
                [x0 + (x1 - x0) * a as f64 / n as f64, y0 + (y1 - y0) * b as f64 / n as f64]
            };
            for b in 0..n {
                for a in 0..n {
                    let sv = [node(a, b), node(a + 1, b), node(a + 1, b + 1), node(a, b + 1)];
                    let sub_edge = |e: usize| -> Vertex {
                        let on_parent = match e {
                            0 => b == 0,
                            1 => a + 1 == n,
                            2 => b + 1 == n,
                            _ => a == 0,
                        };
                        if on_parent {
                            return parent(e);
                        }
                        let (horizontal, sa, sb, va, vb) = match e {
                            0 => (true, a, b, sv[0], sv[1]),
                            1 => (false, a + 1, b, sv[1], sv[2]),
                            2 => (true, a, b + 1, sv[3], sv[2]),
                            _ => (false, a, b, sv[0], sv[3]),
                        };
                        let (ea, eb) = if horizontal { (sa + 1, sb) } else { (sa, sb + 1) };
                        Vertex {
                            key: VertexKey::Sub { k, l, horizontal, a: sa, b: sb },
                            p: crossing(va, vb, pos(sa, sb), pos(ea, eb)),
                        }
                    };
                    let center = || bil((a as f64 + 0.5) / n as f64, (b as f64 + 0.5) / n as f64);
                    march(sv, center, sub_edge, &mut segs);
                }
            }
        }
    }
    (segs, saddles)
}

fn chain(segs: &[(Vertex, Vertex)]) -> Vec<Vec<[f64; 2]>> {
    let mut at: HashMap<VertexKey, Vec<usize>> = HashMap::with_capacity(2 * segs.len());
    for (s, (a, b)) in segs.iter().enumerate() {
        at.entry(a.key).or_default().push(s);
        at.entry(b.key).or_default().push(s);
    }
    let mut used = vec![false; segs.len()];
    let mut lines = Vec::new();
    // Follows segments from `seg` leaving through `key`, appending continuous points.
    let walk = |mut seg: usize, mut key: VertexKey, mut cur: [f64; 2], used: &mut Vec<bool>, pts: &mut Vec<[f64; 2]>| loop {
        let next = at[&key].iter().copied().find(|&s| s != seg && !used[s]);
        let Some(s) = next else { break };
        used[s] = true;
        let (a, b) = segs[s];
        let (from, to) = if a.key == key { (a, b) } else { (b, a) };
        cur = [cur[0] + to.p[0] - from.p[0], cur[1] + to.p[1] - from.p[1]];
        pts.push(cur);
        seg = s;
        key = to.key;
    };
    for s in 0..segs.len() {
        if used[s] {
            continue;
        }
        used[s] = true;
        let (a, b) = segs[s];
        let mut fwd = vec![a.p, b.p];
        walk(s, b.key, b.p, &mut used, &mut fwd);
        let mut back = Vec::new();
        walk(s, a.key, a.p, &mut used, &mut back);
        back.reverse();
        back.extend(fwd);
        lines.push(back);
    }
    lines
}

pub(crate) fn contour(lat: &DualLattice) -> NodalSet {
    let (segs, saddle_points) = segments(lat);
    let total_length = segs
        .iter()
        .map(|(a, b)| (b.p[0] - a.p[0]).hypot(b.p[1] - a.p[1]))
        .sum();
    NodalSet {
        polylines: chain(&segs),
        total_length,
        segment_count: segs.len(),
        perturbed_zeros: 0,
        saddle_points,
    }
}

/// Zero set of the bilinear interpolant through the cell-center samples. Non-periodic
/// axes are extended linearly to the walls, so lines reach the outer boundary.
pub fn extract_nodal_set(field: &ScalarField) -> NodalSet {
    let (values, perturbed) = perturb_zeros(&field.values);
    let lat = DualLattice::new(&field.grid, &values, Padding::Extrapolate);
    let mut set = contour(&lat);
    set.perturbed_zeros = perturbed;
    set
}
