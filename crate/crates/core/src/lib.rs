//! Mode and critical-point counting for Gaussian mixtures.
//!
//! * [`mixture`]: densities, derivatives, tilting and affine-rank reduction.
//! * [`bounds`]: exact upper and lower bounds on mode counts, crossover
//!   dimensions and seed-closure recipes; [`tables`] renders them.
//! * [`reduced`] and [`solver`]: the reduced ratio system and a multistart
//!   solver that finds and classifies critical points.
//! * [`constructions`]: witness mixtures with many modes.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod io;
pub mod mixture;
pub mod reduced;
pub mod solver;
pub mod tables;

pub use error::{Error, Result};
pub use mixture::{GaussianComponent, Mixture};
