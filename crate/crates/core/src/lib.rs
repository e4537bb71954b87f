//! Planning toolkit for offshore grids: builds and solves multi-period,
//! stochastic generation-and-transmission expansion MILPs, clears the
//! resulting system under nodal, zonal and home-market designs (with an
//! idealized re-dispatch step), and reports per-agent benefits, gross
//! consumer surplus and social welfare.

pub mod accounting;
pub mod cases;
pub mod error;
pub mod formulation;
pub mod grid;
pub mod markets;
pub mod model;
pub mod scenario;
pub mod solver;

pub use error::{Error, Result};
