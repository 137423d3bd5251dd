//! Solvers and verification tools for the vanishing-viscosity limit of
//! two-dimensional isentropic compressible flow over a no-slip wall.
//!
//! The crate covers the outer Euler flow and its first-order linearized
//! corrector, the compressible boundary-layer equations in the fast
//! variable `z = y / epsilon`, the composed approximate solution and its
//! residual, a semi-implicit Navier-Stokes reference solver, discrete
//! analogues of the weighted norms used in the analysis, and a sweep
//! harness that fits convergence rates in `epsilon`.

pub mod ansatz;
pub mod checkpoint;
pub mod cns;
pub mod error;
pub mod euler;
pub mod field;
pub mod grid;
pub mod harness;
pub mod initial;
pub mod linalg;
pub mod norms;
pub mod params;
pub mod prandtl;
pub mod stencil;
pub mod timegrid;

pub use error::{Error, Result};
pub use field::{BLField, Field2D, State};
pub use grid::{BLGrid, BLGridSpec, Grid2D, GridSpec};
pub use initial::{compatibility_residual, make_initial_data, InitialSpec, RunConfig};
pub use params::{pressure, SimParams};
