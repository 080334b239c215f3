//! Sign-component labeling and the per-domain view used by the solvers.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};

use super::contour::{contour, perturb_zeros, DualLattice, NodalSet, Padding, ZERO_SHIFT};
use super::distance::inradius;

#[derive(Debug, Clone, PartialEq)]
enum Level {
    /// Zero-shifted samples of the field the mask was built from.
    Field(Vec<f64>),
    /// Synthetic mask: the level function is ±1.
    Indicator,
}

/// 4-connected sign components of a sampled field (labels start at 1; 0 is outside).
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMask {
    grid: GridSpec,
    labels: Vec<u32>,
    signs: Vec<i8>,
    counts: Vec<usize>,
    level: Level,
    perturbed_zeros: usize,
}

fn components(grid: &GridSpec, class: &[i8]) -> (Vec<u32>, Vec<i8>, Vec<usize>) {
    let mut labels = vec![0u32; grid.len()];
    let mut signs = Vec::new();
    let mut counts = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..grid.len() {
        if class[start] == 0 || labels[start] != 0 {
            continue;
        }
        let label = signs.len() as u32 + 1;
        let sign = class[start];
        labels[start] = label;
        queue.push_back(start);
        let mut count = 0;
        while let Some(idx) = queue.pop_front() {
            count += 1;
            let (i, j) = grid.coords(idx);
            for dir in 0..4 {
                if let Some((a, b)) = grid.neighbor(i, j, dir) {
                    let n = grid.index(a, b);
                    if labels[n] == 0 && class[n] == sign {
                        labels[n] = label;
                        queue.push_back(n);
                    }
                }
            }
        }
        signs.push(sign);
        counts.push(count);
    }
    (labels, signs, counts)
}

/// Labels the nodal domains of `field`, numbered in raster order of their first cell.
pub fn label_nodal_domains(field: &ScalarField) -> DomainMask {
    label_nodal_domains_within(field, |_, _| true)
}

/// As [`label_nodal_domains`], but cells rejected by `inside` belong to no domain.
pub fn label_nodal_domains_within(field: &ScalarField, inside: impl Fn(usize, usize) -> bool) -> DomainMask {
    let grid = field.grid;
    let (values, perturbed_zeros) = perturb_zeros(&field.values);
    let class: Vec<i8> = values
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            let (i, j) = grid.coords(idx);
            if !inside(i, j) {
                0
            } else if v > 0.0 {
                1
            } else if v < 0.0 {
                -1
            } else {
                0
            }
        })
        .collect();
    let (labels, signs, counts) = components(&grid, &class);
    DomainMask { grid, labels, signs, counts, level: Level::Field(values), perturbed_zeros }
}

impl DomainMask {
    /// Connected components of the cells accepted by `inside`, all with sign +1.
    pub fn from_cells(grid: GridSpec, inside: impl Fn(usize, usize) -> bool) -> Self {
        let class: Vec<i8> = (0..grid.len())
            .map(|idx| {
                let (i, j) = grid.coords(idx);
                i8::from(inside(i, j))
            })
            .collect();
        let (labels, signs, counts) = components(&grid, &class);
        DomainMask { grid, labels, signs, counts, level: Level::Indicator, perturbed_zeros: 0 }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn label_at(&self, i: usize, j: usize) -> u32 {
        self.labels[self.grid.index(i, j)]
    }

    pub fn label_count(&self) -> usize {
        self.signs.len()
    }

    pub fn perturbed_zeros(&self) -> usize {
        self.perturbed_zeros
    }

    /// The zero-shifted samples, if the mask came from a field.
    pub fn field_values(&self) -> Option<&[f64]> {
        match &self.level {
            Level::Field(v) => Some(v),
            Level::Indicator => None,
        }
    }

    fn check(&self, label: u32) -> Result<usize> {
        if label == 0 || label as usize > self.signs.len() {
            Err(Error::UnknownLabel(label))
        } else {
            Ok(label as usize - 1)
        }
    }

    pub fn sign(&self, label: u32) -> Result<i8> {
        Ok(self.signs[self.check(label)?])
    }

    pub fn cell_count(&self, label: u32) -> Result<usize> {
        Ok(self.counts[self.check(label)?])
    }

    pub fn area(&self, label: u32) -> Result<f64> {
        Ok(self.cell_count(label)? as f64 * self.grid.cell_area())
    }

    /// Area of cells in no domain.
    pub fn unlabeled_area(&self) -> f64 {
        self.labels.iter().filter(|&&l| l == 0).count() as f64 * self.grid.cell_area()
    }

    pub fn region(&self, label: u32) -> Result<Region<'_>> {
        self.check(label)?;
        Ok(Region { mask: self, label })
    }

    /// Label with the most cells (lowest label on ties).
    pub fn largest_label(&self) -> Option<u32> {
        let mut best: Option<(usize, u32)> = None;
        for (k, &c) in self.counts.iter().enumerate() {
            if best.is_none_or(|(b, _)| c > b) {
                best = Some((c, k as u32 + 1));
            }
        }
        best.map(|(_, l)| l)
    }
}

/// One labeled domain of a [`DomainMask`].
#[derive(Debug, Clone, Copy)]
pub struct Region<'a> {
    mask: &'a DomainMask,
    label: u32,
}

impl<'a> Region<'a> {
    pub fn mask(&self) -> &'a DomainMask {
        self.mask
    }

    pub fn grid(&self) -> &'a GridSpec {
        &self.mask.grid
    }

    pub fn label(&self) -> u32 {
        self.label
    }

    pub fn sign(&self) -> i8 {
        self.mask.signs[self.label as usize - 1]
    }

    pub fn cell_count(&self) -> usize {
        self.mask.counts[self.label as usize - 1]
    }

    pub fn area(&self) -> f64 {
        self.cell_count() as f64 * self.mask.grid.cell_area()
    }

    #[inline]
    pub fn contains_index(&self, idx: usize) -> bool {
        self.mask.labels[idx] == self.label
    }

    #[inline]
    pub fn contains_cell(&self, i: usize, j: usize) -> bool {
        self.contains_index(self.mask.grid.index(i, j))
    }

    /// Whether the sampled field (if any) carries a meaningful level function.
    pub fn has_field(&self) -> bool {
        matches!(self.mask.level, Level::Field(_))
    }

    /// Signed level function: positive in the domain, negative elsewhere.
    #[inline]
    pub fn level(&self, idx: usize) -> f64 {
        let inside = self.contains_index(idx);
        let mag = match &self.mask.level {
            Level::Field(v) => v[idx].abs(),
            Level::Indicator => 1.0,
        };
        if inside {
            mag
        } else {
            -mag
        }
    }

    pub fn level_values(&self) -> Vec<f64> {
        (0..self.mask.grid.len()).map(|idx| self.level(idx)).collect()
    }

    /// Cells of the domain in raster order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + 'a {
        let mask = self.mask;
        let label = self.label;
        mask.labels
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l == label)
            .map(move |(idx, _)| mask.grid.coords(idx))
    }

    pub fn indices(&self) -> Vec<usize> {
        let label = self.label;
        self.mask.labels.iter().enumerate().filter(|(_, &l)| l == label).map(|(idx, _)| idx).collect()
    }

    /// The zero contour of the level function, with the outer walls counted as boundary.
    pub fn boundary(&self) -> NodalSet {
        let values = self.level_values();
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let lat = DualLattice::new(&self.mask.grid, &values, Padding::Wall(-ZERO_SHIFT * scale));
        contour(&lat)
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary().total_length
    }

    /// Radius of the largest disk inside the domain, from an exact distance transform.
    pub fn inradius(&self) -> Result<f64> {
        inradius(self)
    }

    /// Cell with the largest level value (first in raster order on ties).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for idx in self.indices() {
            let v = self.level(idx);
            if v > best.0 {
                best = (v, idx);
            }
        }
        self.mask.grid.coords(best.1)
    }
}

/// Perimeter of a labeled domain, counting outer walls.
pub fn boundary_length(mask: &DomainMask, label: u32) -> Result<f64> {
    Ok(mask.region(label)?.boundary_length())
}

/// Inradius of a labeled domain.
pub fn domain_inradius(mask: &DomainMask, label: u32) -> Result<f64> {
    mask.region(label)?.inradius()
}
