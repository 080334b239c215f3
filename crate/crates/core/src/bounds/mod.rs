//! Named numerical experiments. Each one turns an identity, inequality or conjecture
//! about heat flow on nodal domains into measured constants and a verdict.
//!
//! Experiments are selected at run time by name through [`registry`].

mod avoided;
mod ball;
mod common;
pub mod config;
mod cone_decay;
mod comparison;
mod global;
mod heat_content;
mod isoperimetry;
mod max_point;
pub mod report;
mod theorem1;
mod thin;

pub use avoided::{corridor_eigenfunction, CrossingCover};
pub use ball::{ball_ratio, strip_ball_fraction, BallSearch};
pub use common::{interval_mean_survival, interval_survival};
pub use config::{RunConfig, TimeGrid};
pub use cone_decay::{exit_profile, fit_power_law};
pub use report::{fmt_real, Check, ExperimentReport, Severity, Table, Verdict};
pub use thin::{escape_lower_bound, tail_threshold, TubeSpec, VARIANCE_FACTOR};

use crate::error::Result;

/// A runnable experiment.
pub trait Experiment: Sync {
    /// The command-line name.
    fn name(&self) -> &'static str;
    /// One-line description of what is checked.
    fn topic(&self) -> &'static str;
    fn run(&self, cfg: &RunConfig) -> Result<ExperimentReport>;
}

macro_rules! experiment {
    ($ty:ident, $name:literal, $topic:literal, $run:path) => {
        struct $ty;
        impl Experiment for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn topic(&self) -> &'static str {
                $topic
            }
            fn run(&self, cfg: &RunConfig) -> Result<ExperimentReport> {
                $run(cfg, $name, $topic)
            }
        }
    };
}

experiment!(HeatContentRun, "heat-content", "small-time heat content law", heat_content::run);
experiment!(ComparisonRun, "comparison", "killed and frozen-mass evolutions on a nodal domain", comparison::run);
experiment!(Theorem1Run, "theorem1", "nodal length lower bound from heat content", theorem1::run);
experiment!(MaxPointRun, "max-point", "survival at the maximum of an eigenfunction", max_point::run);
experiment!(ThinDomainRun, "thin-domain", "exclusion of nodal domains from thin tubes", thin::run);
experiment!(AvoidedCrossingRun, "avoided-crossing", "square covering of a narrow corridor", avoided::run);
experiment!(ConeRun, "cone", "Brownian exit from planar wedges", cone_decay::run);
experiment!(IsoperimetryRun, "isoperimetry", "heat content against boundary length (conjectural)", isoperimetry::run);
experiment!(GlobalSurvivalRun, "global-survival", "global hitting probability at the wavelength time (conjectural)", global::run);
experiment!(BallSearchRun, "ball-search", "large balls inside domains with large heat content (conjectural)", ball::run);

/// Every experiment, in suite order.
pub fn registry() -> Vec<Box<dyn Experiment>> {
    vec![
        Box::new(HeatContentRun),
        Box::new(ComparisonRun),
        Box::new(Theorem1Run),
        Box::new(MaxPointRun),
        Box::new(ThinDomainRun),
        Box::new(AvoidedCrossingRun),
        Box::new(ConeRun),
        Box::new(IsoperimetryRun),
        Box::new(GlobalSurvivalRun),
        Box::new(BallSearchRun),
    ]
}

pub fn find(name: &str) -> Option<Box<dyn Experiment>> {
    registry().into_iter().find(|e| e.name() == name)
}

pub fn names() -> Vec<&'static str> {
    registry().iter().map(|e| e.name()).collect()
}
