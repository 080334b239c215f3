//! Finite-difference solvers for hitting probabilities and the killed heat semigroup.

mod operator;
mod solver;

pub use operator::HeatOperator;

use crate::error::{invalid, Result};
use crate::fields::PlanarFunction;
use crate::grid::{GridSpec, ScalarField};
use crate::nodal::{DomainMask, Region};

/// Steps per solve used by the experiments unless configured otherwise.
pub const DEFAULT_STEPS: usize = 40;
const MIN_STEPS: usize = 10;
/// Hitting probabilities are computed within this many diffusion lengths `2√t` of the boundary.
const BAND_DIFFUSION_LENGTHS: f64 = 7.0;

impl HeatOperator {
    /// Evolves unknown-space data `u0` to time `t` with boundary value `g`.
    pub fn evolve(&self, u0: &[f64], g: f64, t: f64, n_steps: usize, startup: bool) -> Result<Vec<f64>> {
        if u0.len() != self.len() {
            return Err(invalid(format!("initial data has {} values, operator has {}", u0.len(), self.len())));
        }
        let mut u = u0.to_vec();
        if t > 0.0 {
            solver::march(self, &mut u, g, t / n_steps as f64, n_steps, startup)?;
        }
        Ok(u)
    }
}

/// Probability of hitting the domain boundary by time `t`, per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalField {
    pub grid: GridSpec,
    pub label: u32,
    pub t: f64,
    /// Full-grid values; cells outside the domain hold 1.
    pub values: Vec<f64>,
    /// Largest amount removed by clipping to `[0, 1]`.
    pub clip: f64,
    /// `∫_D p_t`, midpoint rule.
    pub content: f64,
}

impl SurvivalField {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn as_field(&self) -> ScalarField {
        ScalarField { grid: self.grid, values: self.values.clone() }
    }
}

fn check_steps(n_steps: usize) -> Result<()> {
    if n_steps < MIN_STEPS {
        return Err(invalid(format!("need at least {MIN_STEPS} time steps, got {n_steps}")));
    }
    Ok(())
}

fn finish(op: &HeatOperator, region: &Region<'_>, label: u32, t: f64, mut p: Vec<f64>) -> SurvivalField {
    let mut clip = 0.0_f64;
    for v in &mut p {
        let c = v.clamp(0.0, 1.0);
        clip = clip.max((c - *v).abs());
        *v = c;
    }
    let content = p.iter().sum::<f64>() * op.grid().cell_area();
    let mut values = op.extend(&p, 1.0);
    for idx in region.indices() {
        if !op.is_unknown(idx) {
            values[idx] = 0.0;
        }
    }
    SurvivalField { grid: *op.grid(), label, t, values, clip, content }
}

/// Hitting-probability fields at ascending times from one march. Each interval between
/// consecutive times takes `n_steps` steps; only the first starts with implicit Euler.
pub fn hitting_fields(mask: &DomainMask, label: u32, times: &[f64], n_steps: usize) -> Result<Vec<SurvivalField>> {
    check_steps(n_steps)?;
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let region = mask.region(label)?;
    let op = HeatOperator::banded(&region, BAND_DIFFUSION_LENGTHS * 2.0 * t_max.sqrt() + 2.0 * region.grid().h)?;
    let mut p = vec![0.0; op.len()];
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= prev && t.is_finite()) {
            return Err(invalid(format!("times must be finite, nonnegative and ascending, got {times:?}")));
        }
        if t > prev {
            solver::march(&op, &mut p, 1.0, (t - prev) / n_steps as f64, n_steps, prev == 0.0)?;
        }
        out.push(finish(&op, &region, label, t, p.clone()));
        prev = t;
    }
    Ok(out)
}

/// `p_t` on one domain: `∂_t p = Δp`, `p = 1` on the boundary, `p = 0` at `t = 0`.
pub fn solve_hitting_field(mask: &DomainMask, label: u32, t: f64, n_steps: usize) -> Result<SurvivalField> {
    if !(t >= 0.0) {
        return Err(invalid(format!("time must be nonnegative, got {t}")));
    }
    Ok(hitting_fields(mask, label, &[t], n_steps)?.pop().expect("one time"))
}

/// `∫_D p_t`.
pub fn heat_content(mask: &DomainMask, label: u32, t: f64, n_steps: usize) -> Result<f64> {
    Ok(solve_hitting_field(mask, label, t, n_steps)?.content)
}

/// Weighted least-squares fit of `content ≈ c √t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub c: f64,
    pub r2: f64,
}

/// Fit through the origin with weights `1/√t`; `r2` is the weighted, centred value.
pub fn fit_sqrt_slope(times: &[f64], contents: &[f64]) -> SlopeFit {
    let w: Vec<f64> = times.iter().map(|t| 1.0 / t.sqrt()).collect();
    let s: Vec<f64> = times.iter().map(|t| t.sqrt()).collect();
    let num: f64 = (0..times.len()).map(|k| w[k] * s[k] * contents[k]).sum();
    let den: f64 = (0..times.len()).map(|k| w[k] * s[k] * s[k]).sum();
    let c = num / den;
    let wsum: f64 = w.iter().sum();
    let mean = (0..times.len()).map(|k| w[k] * contents[k]).sum::<f64>() / wsum;
    let ss_res: f64 = (0..times.len()).map(|k| w[k] * (contents[k] - c * s[k]).powi(2)).sum();
    let ss_tot: f64 = (0..times.len()).map(|k| w[k] * (contents[k] - mean).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    SlopeFit { c, r2 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatContentCurve {
    pub times: Vec<f64>,
    pub contents: Vec<f64>,
    pub slope_fit: SlopeFit,
    pub clip: f64,
    /// Violated preconditions that do not stop the computation.
    pub warnings: Vec<String>,
}

impl HeatContentCurve {
    /// `content / √t` at each time.
    pub fn running_slopes(&self) -> Vec<f64> {
        self.times.iter().zip(&self.contents).map(|(t, c)| c / t.sqrt()).collect()
    }
}

pub fn heat_content_curve(mask: &DomainMask, label: u32, times: &[f64], n_steps: usize) -> Result<HeatContentCurve> {
    if times.len() < 4 {
        return Err(invalid(format!("slope fit needs at least 4 times, got {}", times.len())));
    }
    if times.iter().any(|&t| !(t > 0.0)) {
        return Err(invalid("slope fit needs positive times"));
    }
    let fields = hitting_fields(mask, label, times, n_steps)?;
    let contents: Vec<f64> = fields.iter().map(|f| f.content).collect();
    let mut warnings = Vec::new();
    let (t0, t1) = (times[0], times[times.len() - 1]);
    if t1 < 10.0 * t0 * (1.0 - 1e-9) {
        warnings.push(format!("times span less than a decade ({t0:.3e} to {t1:.3e})"));
    }
    if let Ok(r) = mask.region(label)?.inradius() {
        if t1 > r * r {
            warnings.push(format!("largest time {t1:.3e} exceeds the squared inradius {:.3e}", r * r));
        }
    }
    Ok(HeatContentCurve {
        slope_fit: fit_sqrt_slope(times, &contents),
        clip: fields.iter().map(|f| f.clip).fold(0.0, f64::max),
        times: times.to_vec(),
        contents,
        warnings,
    })
}

/// Killed heat evolution of `f` on one domain, zero outside.
pub fn dirichlet_semigroup_field(
    f: &dyn PlanarFunction,
    mask: &DomainMask,
    label: u32,
    t: f64,
    n_steps: usize,
) -> Result<ScalarField> {
    check_steps(n_steps)?;
    if !(t >= 0.0) {
        return Err(invalid(format!("time must be nonnegative, got {t}")));
    }
    let op = HeatOperator::new(&mask.region(label)?)?;
    let grid = *mask.grid();
    let u0: Vec<f64> = op.cells().iter().map(|&idx| {
        let (i, j) = grid.coords(idx);
        f.value(grid.center(i, j))
    }).collect();
    let u = op.evolve(&u0, 0.0, t, n_steps, true)?;
    Ok(ScalarField { grid, values: op.extend(&u, 0.0) })
}

/// Log-spaced times from `a` to `b` inclusive.
pub fn log_times(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests;
