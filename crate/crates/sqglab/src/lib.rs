//! # sqglab
//!
//! A pseudo-spectral laboratory for the 2D surface quasi-geostrophic (SQG)
//! equation on the periodic square,
//!
//! ```text
//! d_t theta + v[theta] . grad theta = 0,      v[theta] = R^perp theta,
//! ```
//!
//! where `R^perp` is the perpendicular Riesz transform (the SQG Biot-Savart
//! law). The crate provides
//!
//! * a spectral core (transforms, Fourier multipliers, Riesz velocity,
//!   2/3-rule dealiasing) in [`spectral`],
//! * generators for oscillatory backgrounds, perturbations, P-fold
//!   arrangements and multi-scale glued data in [`construction`],
//! * fractional Sobolev / Slobodeckij / Hoelder norm evaluators in [`norms`],
//! * an RK4 time stepper with prescribed-velocity and trajectory modes in
//!   [`solver`],
//! * scripted, threshold-checked experiments in [`experiments`],
//! * config parsing, snapshot I/O and the `sqglab` CLI in [`config`],
//!   [`snapshot`] and [`cli`].
//!
//! Each major capability has a runnable demo under `examples/`.

pub mod cli;
pub mod config;
pub mod construction;
pub mod cutoff;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod field;
pub mod fit;
pub mod grid;
pub mod norms;
pub mod saddle;
pub mod snapshot;
pub mod solver;
pub mod spectral;
pub mod trajectories;
pub mod util;

pub use error::{Error, Result};
pub use field::{ScalarField, SpectralField, VectorField};
pub use grid::Grid;
