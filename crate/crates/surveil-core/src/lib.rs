//! Core models for hierarchical UAV surveillance networks.
//!
//! Two stacked airspace layers of sub-UAVs, each served by a central UAV
//! hovering above a ground station, are analysed end to end:
//!
//! - [`airspace`]: stacked-box deployment geometry, Poisson point process
//!   sampling and the nearest-neighbor distance law.
//! - [`a2g`]: deterministic curved-earth multi-ray channel between a
//!   central UAV and the ground station (reflection geometry, path loss,
//!   SNR, Rician fade averaging).
//! - [`a2a`]: stochastic air-to-air layer: SINR realizations, Monte Carlo
//!   coverage and the analytic coverage probability via a Laplace-functional
//!   integral.
//! - [`adsb`] / [`sbs`]: bit-exact codecs for the 112-bit extended squitter
//!   frame and the BaseStation ("MSG,3") airborne position text line.
//! - [`mec`]: the on-board processor run on a central UAV: sliding
//!   Minkowski-distance window driving packet abandonment and packet
//!   supplement with circumsphere interpolation.
//!
//! The crate is `no_std` compatible (requires `alloc`); all I/O, file
//! formats and experiment drivers live in the companion `surveil-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod a2a;
pub mod a2g;
pub mod airspace;
pub mod adsb;
pub mod mec;
pub mod rng;
pub mod sbs;
pub mod units;

mod numeric;
