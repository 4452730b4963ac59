//! Exact combinatorics of Hamiltonian torus actions on symplectic 4-manifolds.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is exact: areas are
//! [`Q`] rationals in units where 2π = 1, so the area of an invariant sphere
//! equals the rational length of the corresponding polygon edge.
//!
//! * [`lattice`]: second homology of blow-ups of CP² and of ruled surfaces,
//!   exceptional classes and minimal blow-down chains.
//! * [`polygon`]: Delzant polygons, canonical forms, corner chops.
//! * [`graph`]: labelled graphs of Hamiltonian circle actions.
//! * [`census`]: the inductive count of maximal tori for a blow-up recipe.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod census;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod polygon;
pub mod rational;

pub use error::Error;
pub use rational::Q;

pub type Result<T> = core::result::Result<T, Error>;
