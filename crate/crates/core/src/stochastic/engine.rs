//! Path ensembles: configuration, stepping, and ensemble statistics.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Result};

use super::domain::KillingDomain;
use super::rng::{counter_uniform, path_rng, splitmix64};

pub const DEFAULT_SEED: u64 = 0x00C0_FFEE_2024;

/// Brownian simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEnsembleConfig {
    pub n_paths: usize,
    /// Time step; `None` means `t / 1000` for horizon `t`.
    pub dt: Option<f64>,
    pub seed: u64,
    pub bridge_correction: bool,
}

impl Default for PathEnsembleConfig {
    fn default() -> Self {
        Self { n_paths: 100_000, dt: None, seed: DEFAULT_SEED, bridge_correction: true }
    }
}

impl PathEnsembleConfig {
    pub fn with_paths(n_paths: usize, seed: u64) -> Self {
        Self { n_paths, seed, ..Self::default() }
    }

    /// Step count and step length for horizon `t`.
    pub fn steps_for(&self, t: f64) -> Result<(usize, f64)> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {t}")));
        }
        if self.n_paths < 100 {
            return Err(invalid(format!("need at least 100 paths, got {}", self.n_paths)));
        }
        let dt = self.dt.unwrap_or(t / 1000.0);
        if !(dt > 0.0) || dt > t / 100.0 * (1.0 + 1e-12) {
            return Err(invalid(format!("time step {dt} must lie in (0, t/100] for t = {t}")));
        }
        let n = (t / dt).ceil().max(1.0) as usize;
        Ok((n, t / n as f64))
    }
}

/// Mean of per-path samples with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
}

impl McEstimate {
    /// Sequential, fixed-order statistics of `samples`.
    pub fn from_samples(samples: impl IntoIterator<Item = f64>) -> Self {
        let mut n = 0usize;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for x in samples {
            n += 1;
            let d = x - mean;
            mean += d / n as f64;
            m2 += d * (x - mean);
        }
        let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
        Self { mean, std_error: (var / n.max(1) as f64).sqrt(), n_paths: n }
    }

    pub fn exact(value: f64, n_paths: usize) -> Self {
        Self { mean: value, std_error: 0.0, n_paths }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self { mean: c * self.mean, std_error: c.abs() * self.std_error, n_paths: self.n_paths }
    }

    /// Whether `|mean − reference| ≤ k·std_error + allowance`.
    pub fn agrees_with(&self, reference: f64, k: f64, allowance: f64) -> bool {
        (self.mean - reference).abs() <= k * self.std_error + allowance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    /// Still inside at the horizon.
    Alive,
    Killed,
    /// Reached a stopping set before being killed.
    Stopped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub fate: Fate,
    pub steps: usize,
}

impl PathOutcome {
    #[inline]
    pub fn survived(&self) -> bool {
        self.fate != Fate::Killed
    }
}

/// Stepping parameters shared by every path of an ensemble.
#[derive(Debug, Clone, Copy)]
pub struct Stepper {
    pub n_steps: usize,
    pub step: f64,
    pub bridge: bool,
    pub seed: u64,
    pub tag: u64,
}

/// Runs one path from `start`. Gaussian increments come from the path's own stream;
/// bridge uniforms are addressed by `(path, step)`.
pub fn run_path<D: KillingDomain + ?Sized>(
    domain: &D,
    start: [f64; 2],
    st: &Stepper,
    path: u64,
    rng: &mut impl rand::Rng,
) -> PathOutcome {
    let sd = (2.0 * st.step).sqrt();
    let key = splitmix64(st.seed ^ st.tag ^ 0xB81D_6E00_0000_0001);
    let bridge_cut = 45.0 * st.step;
    let mut p = start;
    let mut d0 = domain.boundary_distance(p);
    for s in 0..st.n_steps {
        let z0: f64 = StandardNormal.sample(rng);
        let z1: f64 = StandardNormal.sample(rng);
        let raw = [p[0] + sd * z0, p[1] + sd * z1];
        let q = domain.wrap(raw);
        let d1 = match domain.probe(q) {
            Some(d) if !domain.step_crosses(p, raw) => d,
            _ => return PathOutcome { start, end: q, fate: Fate::Killed, steps: s + 1 },
        };
        if st.bridge {
            let prod = d0 * d1;
            if prod < bridge_cut && counter_uniform(key, path, s as u64) < (-prod / st.step).exp() {
                return PathOutcome { start, end: q, fate: Fate::Killed, steps: s + 1 };
            }
        }
        if domain.stops(q) {
            return PathOutcome { start, end: q, fate: Fate::Stopped, steps: s + 1 };
        }
        p = q;
        d0 = d1;
    }
    PathOutcome { start, end: p, fate: Fate::Alive, steps: st.n_steps }
}

/// Runs `n_paths` paths in parallel; the start of each path is drawn from its own
/// stream before stepping. The result order is the path order, whatever the thread count.
pub fn simulate<D, S>(domain: &D, n_paths: usize, st: &Stepper, start: S) -> Vec<PathOutcome>
where
    D: KillingDomain + ?Sized,
    S: Fn(&mut rand_chacha::ChaCha8Rng) -> [f64; 2] + Sync,
{
    (0..n_paths as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = path_rng(st.seed, st.tag, k);
            let x = start(&mut rng);
            if !domain.contains(x) {
                return PathOutcome { start: x, end: x, fate: Fate::Killed, steps: 0 };
            }
            run_path(domain, x, st, k, &mut rng)
        })
        .collect()
}

/// Paths from a fixed start up to horizon `t`.
pub fn simulate_from<D: KillingDomain + ?Sized>(
    domain: &D,
    x: [f64; 2],
    t: f64,
    cfg: &PathEnsembleConfig,
    tag: u64,
) -> Result<Vec<PathOutcome>> {
    let (n_steps, step) = cfg.steps_for(t)?;
    let st = Stepper { n_steps, step, bridge: cfg.bridge_correction, seed: cfg.seed, tag };
    Ok(simulate(domain, cfg.n_paths, &st, |_| x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::domain::HalfPlane;

    #[test]
    fn config_validation() {
        let cfg = PathEnsembleConfig::default();
        assert_eq!(cfg.steps_for(1.0).unwrap().0, 1000);
        assert!(cfg.steps_for(0.0).is_err());
        let coarse = PathEnsembleConfig { dt: Some(0.1), ..cfg };
        assert!(coarse.steps_for(1.0).is_err());
        let few = PathEnsembleConfig { n_paths: 99, ..cfg };
        assert!(few.steps_for(1.0).is_err());
        let odd = PathEnsembleConfig { dt: Some(0.003), ..cfg };
        let (n, step) = odd.steps_for(1.0).unwrap();
        assert_eq!(n, 334);
        assert!((step * n as f64 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_statistics() {
        let e = McEstimate::from_samples([1.0, 0.0, 1.0, 0.0]);
        assert_eq!(e.mean, 0.5);
        assert!((e.std_error - (1.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(e.agrees_with(0.6, 1.0, 0.0));
        assert_eq!(McEstimate::from_samples([]).n_paths, 0);
    }

    #[test]
    fn ensembles_do_not_depend_on_thread_count() {
        let cfg = PathEnsembleConfig::with_paths(2000, 5);
        let d = HalfPlane::below_x(0.3);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_from(&d, [0.0, 0.0], 0.05, &cfg, 1).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn free_increments_have_variance_two_t() {
        let cfg = PathEnsembleConfig { n_paths: 20_000, dt: Some(0.01), seed: 3, bridge_correction: false };
        let out = simulate_from(&HalfPlane::below_x(1e9), [0.0, 0.0], 1.0, &cfg, 2).unwrap();
        let var = McEstimate::from_samples(out.iter().map(|o| o.end[0] * o.end[0])).mean;
        assert!((var - 2.0).abs() < 0.1, "{var}");
    }
}
