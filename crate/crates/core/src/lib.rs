//! Graph reconstruction from density fields with persistence-guided discrete
//! Morse theory.
//!
//! The pipeline triangulates a regular grid, builds the lower-star filtration of
//! the negated density, pairs simplices by persistence, and extracts the
//! 1-unstable manifolds of every edge whose persistence exceeds a threshold `δ`.
//! Two extraction routes are provided:
//!
//! * [`reconstruct`] builds a spanning forest from low-persistence vertex-edge
//!   pairs and traces tree paths to sinks; no gradient field is maintained.
//! * [`morse_oracle`] maintains an explicit discrete gradient field and
//!   performs Morse cancellations in persistence order.
//!
//! Both routes produce identical graphs. [`noise_model`] generates synthetic
//! densities concentrated around a known graph and checks the output against it.

pub mod bench;
pub mod complex;
pub mod error;
pub mod io;
pub mod morse_oracle;
pub mod noise_model;
pub mod persistence;
pub mod reconstruct;
mod union_find;

pub use complex::{
    build_grid_complex, lower_star_filtration, Filtration, GridSpec, ScalarField, SimplexId,
    SimplicialComplex,
};
pub use error::{Error, Result};
pub use persistence::{compute_pairs, PairingSet, PersistencePair};
pub use reconstruct::{reconstruct, Forest, ReconstructedGraph};
