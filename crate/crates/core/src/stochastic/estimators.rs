//! Feynman–Kac estimators on shared path ensembles.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fields::PlanarFunction;
use crate::nodal::DomainMask;
use crate::special::erfc;

use super::domain::{HalfPlane, KillingDomain, RegionDomain};
use super::engine::{simulate, simulate_from, McEstimate, PathEnsembleConfig, PathOutcome, Stepper};

/// Stream tag shared by the hitting, Dirichlet and Ξ estimators, so that equal seeds
/// reuse the same paths.
pub const SHARED_PATHS: u64 = 1;
const UNIFORM_STARTS: u64 = 2;
const SUP_PATHS: u64 = 3;

/// Three estimates from one path ensemble started at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharedPathEstimate {
    /// `E_x[u(ω_t) ψ]`.
    pub dirichlet: McEstimate,
    /// `E_x[u(ω_t) ψ] + E_x[1 − ψ] u(x)`.
    pub xi: McEstimate,
    /// `E_x[1 − ψ]`.
    pub hitting: McEstimate,
    pub u_x: f64,
    /// `xi − dirichlet − hitting·u(x)`, zero up to rounding.
    pub identity_residual: f64,
    /// Start closer to the boundary than one cell (discretisation-dominated).
    pub near_boundary: bool,
}

fn checked_start<D: KillingDomain + ?Sized>(domain: &D, x: [f64; 2]) -> Result<()> {
    if domain.contains(x) {
        Ok(())
    } else {
        Err(Error::OutsideDomain { x: x[0], y: x[1] })
    }
}

/// Shared-path estimates for any killing domain.
pub fn shared_path_estimates_in<D: KillingDomain + ?Sized>(
    f: &dyn PlanarFunction,
    domain: &D,
    x: [f64; 2],
    t: f64,
    cfg: &PathEnsembleConfig,
) -> Result<SharedPathEstimate> {
    checked_start(domain, x)?;
    let u_x = f.value(x);
    if t == 0.0 {
        return Ok(SharedPathEstimate {
            dirichlet: McEstimate::exact(u_x, cfg.n_paths),
            xi: McEstimate::exact(u_x, cfg.n_paths),
            hitting: McEstimate::exact(0.0, cfg.n_paths),
            u_x,
            identity_residual: 0.0,
            near_boundary: false,
        });
    }
    let paths = simulate_from(domain, x, t, cfg, SHARED_PATHS)?;
    let dirichlet_of = |o: &PathOutcome| if o.survived() { f.value(o.end) } else { 0.0 };
    let killed = |o: &PathOutcome| if o.survived() { 0.0 } else { 1.0 };
    let dirichlet = McEstimate::from_samples(paths.iter().map(dirichlet_of));
    let hitting = McEstimate::from_samples(paths.iter().map(killed));
    let xi = McEstimate::from_samples(paths.iter().map(|o| dirichlet_of(o) + killed(o) * u_x));
    Ok(SharedPathEstimate {
        dirichlet,
        xi,
        hitting,
        u_x,
        identity_residual: xi.mean - dirichlet.mean - hitting.mean * u_x,
        near_boundary: false,
    })
}

/// Shared-path estimates on a labeled nodal domain.
pub fn shared_path_estimates(
    f: &dyn PlanarFunction,
    mask: &DomainMask,
    label: u32,
    x: [f64; 2],
    t: f64,
    cfg: &PathEnsembleConfig,
) -> Result<SharedPathEstimate> {
    let region = mask.region(label)?;
    let domain = RegionDomain::new(&region);
    let mut est = shared_path_estimates_in(f, &domain, x, t, cfg)?;
    est.near_boundary = domain.boundary_distance(x) < mask.grid().h;
    Ok(est)
}

/// Probability that a path from `x` is killed by time `t`.
pub fn estimate_hitting_probability(
    mask: &DomainMask,
    label: u32,
    x: [f64; 2],
    t: f64,
    cfg: &PathEnsembleConfig,
) -> Result<McEstimate> {
    let one = crate::fields::FnField(|_| 1.0);
    Ok(shared_path_estimates(&one, mask, label, x, t, cfg)?.hitting)
}

/// `E_x[u(ω_t) ψ]`, the killed evolution of `u`.
pub fn feynman_kac_dirichlet(
    f: &dyn PlanarFunction,
    mask: &DomainMask,
    label: u32,
    x: [f64; 2],
    t: f64,
    cfg: &PathEnsembleConfig,
) -> Result<McEstimate> {
    Ok(shared_path_estimates(f, mask, label, x, t, cfg)?.dirichlet)
}

/// The Ξ evolution: killed mass is frozen at the start point.
pub fn xi_evolution(
    f: &dyn PlanarFunction,
    mask: &DomainMask,
    label: u32,
    x: [f64; 2],
    t: f64,
    cfg: &PathEnsembleConfig,
) -> Result<McEstimate> {
    Ok(shared_path_estimates(f, mask, label, x, t, cfg)?.xi)
}

/// Domain integrals from uniformly started paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationEstimate {
    /// `∫_D u`.
    pub integral_u: McEstimate,
    /// `∫_D e^{tΞ} u`.
    pub integral_xi: McEstimate,
    /// `∫_D (e^{tΞ} u − u)`, estimated path by path.
    pub difference: McEstimate,
}

/// Checks `∫_D e^{tΞ}u = ∫_D u` with starts uniform over the cells within one cell
/// of the domain; starts outside the domain contribute zero.
pub fn conservation_check(
    f: &dyn PlanarFunction,
    mask: &DomainMask,
    label: u32,
    t: f64,
    cfg: &PathEnsembleConfig,
) -> Result<ConservationEstimate> {
    let region = mask.region(label)?;
    let grid = *mask.grid();
    let domain = RegionDomain::new(&region);
    let mut candidate = vec![false; grid.len()];
    for (i, j) in region.cells() {
        candidate[grid.index(i, j)] = true;
        for dir in 0..4 {
            if let Some((a, b)) = grid.neighbor(i, j, dir) {
                candidate[grid.index(a, b)] = true;
                for dir2 in 2..4 {
                    if let Some((c, d)) = grid.neighbor(a, b, dir2) {
                        candidate[grid.index(c, d)] = true;
                    }
                }
            }
        }
    }
    let cells: Vec<usize> = (0..grid.len()).filter(|&k| candidate[k]).collect();
    let area = cells.len() as f64 * grid.cell_area();
    let (n_steps, step) = cfg.steps_for(t)?;
    let st = Stepper { n_steps, step, bridge: cfg.bridge_correction, seed: cfg.seed, tag: UNIFORM_STARTS };
    let paths = simulate(&domain, cfg.n_paths, &st, |rng| {
        let (i, j) = grid.coords(cells[rng.random_range(0..cells.len())]);
        let c = grid.center(i, j);
        let (a, b): (f64, f64) = (rng.random(), rng.random());
        [c[0] + (a - 0.5) * grid.h, c[1] + (b - 0.5) * grid.h]
    });
    let inside = |o: &PathOutcome| domain.contains(o.start);
    let u0 = |o: &PathOutcome| if inside(o) { f.value(o.start) } else { 0.0 };
    let xi = |o: &PathOutcome| {
        if !inside(o) {
            0.0
        } else if o.survived() {
            f.value(o.end)
        } else {
            f.value(o.start)
        }
    };
    Ok(ConservationEstimate {
        integral_u: McEstimate::from_samples(paths.iter().map(u0)).scaled(area),
        integral_xi: McEstimate::from_samples(paths.iter().map(xi)).scaled(area),
        difference: McEstimate::from_samples(paths.iter().map(|o| xi(o) - u0(o))).scaled(area),
    })
}

/// Simulated and exact `P(sup_{s≤t} B(s) > a)` for one coordinate of the process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupHitting {
    pub mc: McEstimate,
    pub exact: f64,
}

pub fn sup_hitting_check(a: f64, t: f64, cfg: &PathEnsembleConfig) -> Result<SupHitting> {
    if !(a >= 0.0 && t > 0.0) {
        return Err(crate::error::invalid(format!("need a ≥ 0 and t > 0, got a = {a}, t = {t}")));
    }
    let exact = erfc(a / (2.0 * t.sqrt()));
    let domain = HalfPlane::below_x(a);
    if a == 0.0 {
        return Ok(SupHitting { mc: McEstimate::exact(1.0, cfg.n_paths), exact });
    }
    let paths = simulate_from(&domain, [0.0, 0.0], t, cfg, SUP_PATHS)?;
    let mc = McEstimate::from_samples(paths.iter().map(|o| if o.survived() { 0.0 } else { 1.0 }));
    Ok(SupHitting { mc, exact })
}

/// Hitting probability for an arbitrary killing domain.
pub fn hitting_probability_in<D: KillingDomain + ?Sized>(
    domain: &D,
    x: [f64; 2],
    t: f64,
    cfg: &PathEnsembleConfig,
) -> Result<McEstimate> {
    checked_start(domain, x)?;
    if t == 0.0 {
        return Ok(McEstimate::exact(0.0, cfg.n_paths));
    }
    let paths = simulate_from(domain, x, t, cfg, SHARED_PATHS)?;
    Ok(McEstimate::from_samples(paths.iter().map(|o| if o.survived() { 0.0 } else { 1.0 })))
}
