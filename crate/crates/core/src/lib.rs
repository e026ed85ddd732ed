//! Coordination of DER aggregators by a distribution system operator.
//!
//! The crate is `no_std` (it needs `alloc`). It holds the scenario model,
//! the MILP compiled from it, a self-contained simplex/branch-and-bound
//! solver and the post-solve revenue analysis. File formats, the CLI and
//! threaded sweeps live in the `dso` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod casestudy;
pub mod formulation;
pub mod model;
pub mod solver;
