//! Exit of Brownian motion from a planar wedge before reaching a given radius.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Result};

use super::domain::{KillingDomain, Wedge};
use super::engine::{McEstimate, PathEnsembleConfig};
use super::rng::{counter_uniform, path_rng, splitmix64};

const CONE_PATHS: u64 = 4;

/// The wedge `W(α) = {|θ| < α/2}` and the stopping radius `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSpec {
    pub alpha: f64,
    pub r: f64,
}

impl ConeSpec {
    pub fn new(alpha: f64, r: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0 * PI + 1e-12) {
            return Err(invalid(format!("opening angle must lie in (0, 2π], got {alpha}")));
        }
        if !(r > 1.0 && r.is_finite()) {
            return Err(invalid(format!("stopping radius must exceed 1, got {r}")));
        }
        Ok(Self { alpha, r })
    }

    /// Default time step at unit radius: a twentieth of the wall distance at the start
    /// point, squared, halved.
    pub fn default_dt(&self) -> f64 {
        let s = 0.05 * (0.5 * self.alpha).min(0.5 * PI).sin();
        0.5 * s * s
    }
}

/// Probability that a path from `(1, 0)` reaches radius `r` before leaving the wedge.
pub fn cone_exit_exact(spec: &ConeSpec) -> f64 {
    // With x = r^{-π/α} the closed form 2r^{π/α}/(r^{2π/α} − 1) equals 2x/(1 − x²).
    let x = spec.r.powf(-PI / spec.alpha);
    2.0 / PI * (2.0 * x).atan2(1.0 - x * x)
}

/// Step cap per path; undecided paths count as exits from the wedge.
const MAX_STEPS: usize = 2_000_000;

/// Largest radius each path from `(1, 0)` reaches before leaving the wedge `|θ| < α/2`,
/// capped at `r_max`. Steps scale with the radius, `dt = dt₁ ρ²`, so every scale is
/// resolved alike; `dt₁` is `cfg.dt` or [`ConeSpec::default_dt`].
pub fn wedge_excursions(alpha: f64, r_max: f64, cfg: &PathEnsembleConfig) -> Result<Vec<f64>> {
    let spec = ConeSpec::new(alpha, r_max)?;
    let dt1 = cfg.dt.unwrap_or_else(|| spec.default_dt());
    if !(dt1 > 0.0 && dt1 <= 0.01) {
        return Err(invalid(format!("unit-radius time step must lie in (0, 0.01], got {dt1}")));
    }
    if cfg.n_paths < 100 {
        return Err(invalid(format!("need at least 100 paths, got {}", cfg.n_paths)));
    }
    let wedge = Wedge { alpha, stop_radius: r_max };
    let key = splitmix64(cfg.seed ^ CONE_PATHS ^ 0xB81D_6E00_0000_0001);
    let bridge = cfg.bridge_correction;
    Ok((0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = path_rng(cfg.seed, CONE_PATHS, k);
            let mut p = [1.0, 0.0];
            let mut rho = 1.0_f64;
            let mut best = 1.0_f64;
            let mut d0 = wedge.boundary_distance(p);
            for s in 0..MAX_STEPS {
                let dt = dt1 * rho * rho;
                let sd = (2.0 * dt).sqrt();
                let z0: f64 = StandardNormal.sample(&mut rng);
                let z1: f64 = StandardNormal.sample(&mut rng);
                let q = [p[0] + sd * z0, p[1] + sd * z1];
                if !wedge.contains(q) || wedge.step_crosses(p, q) {
                    return best;
                }
                let d1 = wedge.boundary_distance(q);
                if bridge && d0 * d1 < 45.0 * dt && counter_uniform(key, k, s as u64) < (-d0 * d1 / dt).exp() {
                    return best;
                }
                rho = q[0].hypot(q[1]);
                best = best.max(rho);
                if rho >= r_max {
                    return r_max;
                }
                p = q;
                d0 = d1;
            }
            best
        })
        .collect())
}

/// Monte Carlo estimate of [`cone_exit_exact`].
pub fn cone_exit_mc(spec: &ConeSpec, cfg: &PathEnsembleConfig) -> Result<McEstimate> {
    let reach = wedge_excursions(spec.alpha, spec.r, cfg)?;
    Ok(McEstimate::from_samples(reach.iter().map(|&r| if r >= spec.r { 1.0 } else { 0.0 })))
}
