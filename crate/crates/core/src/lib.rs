//! Coverage analysis and position-aware optimization for fluid integrated
//! reflecting and emitting surfaces (FIRES) serving one reflection-side and
//! one transmission-side user under OMA or NOMA.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: aperture, preset grid, placements, spacing repair.
//! - [`channel`]: Rician hops with Jakes-correlated scattering, phase errors.
//! - [`coverage`]: closed-form far-field radii.
//! - [`access`]: OMA time-split and NOMA power/energy-split inner solvers.
//! - [`scenario`]: position-aware evaluation of a placement.
//! - [`pso`]: outer particle swarm over element positions.
//! - [`harness`]: configuration files, sweeps, baselines, benchmarks.
//!
//! All core routines take linear units. Decibel parsing lives in
//! [`harness::units`].

pub mod access;
pub mod channel;
pub mod coverage;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod optim;
pub mod pso;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
