//! Divide-and-Colour percolation built on the q = 2 random-cluster measure of
//! the triangular lattice.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the lattice
//! geometry, a Swendsen-Wang sampler for the FK edge marginal together with an
//! exhaustive oracle for tiny graphs, the colouring layer that turns an edge
//! configuration into spins for every `r` at once, and the crossing / cut-point
//! / pivotality analysis used by the experiments in the `tridac` crate.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod cutpoints;
pub mod dac;
mod error;
pub mod lattice;
pub mod rcm;
pub mod rng;
pub mod unionfind;

pub use error::{Error, Result};
