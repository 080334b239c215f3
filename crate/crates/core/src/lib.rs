//! Heat flow and Brownian motion on nodal sets of planar Laplacian eigenfunctions.
//!
//! The generator throughout is `Δ`: Brownian increments have variance `2 dt` per
//! coordinate, and the Dirichlet evolution of an eigenfunction is `e^{-λt} u`.

pub mod bounds;
pub mod error;
pub mod fields;
pub mod grid;
pub mod heat;
pub mod nodal;
pub mod special;
pub mod stochastic;

pub use error::{Error, Result};
pub use fields::{EigenfunctionModel, NormBundle, PlanarFunction};
pub use grid::{GridSpec, ScalarField};
pub use nodal::{DomainMask, NodalSet, Region};
