//! Brownian paths with absorbing boundaries and Feynman–Kac estimators.
//!
//! Increments are `Normal(0, 2 dt)` per coordinate, so the generator is `Δ`.

mod cone;
mod domain;
mod engine;
mod estimators;
pub(crate) mod rng;

pub use cone::{cone_exit_exact, cone_exit_mc, wedge_excursions, ConeSpec};
pub use domain::{Corridor, HalfPlane, KillingDomain, RegionDomain, Tube, Wedge};
pub use engine::{
    run_path, simulate, simulate_from, Fate, McEstimate, PathEnsembleConfig, PathOutcome, Stepper, DEFAULT_SEED,
};
pub use estimators::{
    conservation_check, estimate_hitting_probability, feynman_kac_dirichlet, hitting_probability_in,
    shared_path_estimates, shared_path_estimates_in, sup_hitting_check, xi_evolution, ConservationEstimate,
    SharedPathEstimate, SupHitting, SHARED_PATHS,
};
