//! Sampling-complexity laboratory for free bosons hopping on a lattice.
//!
//! Exact (permanent-based) output distributions, the distinguishable-particle
//! classical sampler, total-variation-distance measurements against
//! Lieb-Robinson envelopes, Anderson-localized dynamics, and compilation of
//! arbitrary unitaries into nearest-neighbor gate schedules.

pub mod bosonic;
pub mod bounds;
pub mod classical;
pub mod cli;
pub mod compiler;
pub mod dynamics;
pub mod lattice;
pub mod permanent;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
