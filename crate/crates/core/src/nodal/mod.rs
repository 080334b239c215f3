//! Nodal sets, nodal domains and their geometry on sampled fields.

mod contour;
mod distance;
mod label;

pub use contour::{extract_nodal_set, NodalSet, ZERO_SHIFT};
pub use label::{
    boundary_length, domain_inradius, label_nodal_domains, label_nodal_domains_within, DomainMask, Region,
};

pub use crate::fields::sample_field;
pub(crate) use distance::squared_distance_cells;
