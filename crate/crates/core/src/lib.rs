//! Time-of-arrival positioning for 5G NR with comb-type PRS, mixed
//! numerologies, an IRS codebook and differentially private anchor
//! locations, together with the HOMD optimizer that tunes power,
//! anchor privacy, user-anchor association, numerology/comb offsets and
//! the IRS beam.
//!
//! The crate is `no_std` and only needs `alloc`. Randomness is always
//! passed in explicitly; every public entry point is deterministic for a
//! given seed.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod error;
pub mod integrals;
pub mod model;
pub mod numerology;
pub mod optimizer;
pub mod oracles;
pub mod positioning;
pub mod privacy;
pub mod ranging;
pub mod rng;
pub mod scenario;
pub mod specfun;
pub mod state;

pub use error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
