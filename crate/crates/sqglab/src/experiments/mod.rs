//! Scripted, reproducible experiments with pre-registered thresholds.
//!
//! Each experiment maps one mechanism to a measured desk-scale check and
//! emits an [`report::ExperimentReport`] (JSON + CSV + fit table). Verdicts
//! come exclusively from the constants in [`thresholds`]; fits with poor
//! `r^2` or truncated windows downgrade to inconclusive rather than pass.

pub mod background;
pub mod cancellation;
pub mod decay;
pub mod gluing;
pub mod inflation;
pub mod loss_profile;
pub mod report;
pub mod stationarity;
pub mod thresholds;

use crate::config::PresetSpec;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::spectral;
pub use report::{ExperimentReport, Verdict};

pub const EXPERIMENT_NAMES: &[&str] = &[
    "stationarity",
    "decay",
    "cancellation",
    "saddle-inflation",
    "background-error",
    "gluing",
    "loss-profile",
];

pub fn run_experiment(name: &str, preset: &PresetSpec) -> Result<ExperimentReport> {
    match name {
        "stationarity" => stationarity::run_experiment(preset),
        "decay" => decay::run_experiment(preset),
        "cancellation" => cancellation::run_experiment(preset),
        "saddle-inflation" => inflation::run_experiment(preset),
        "background-error" => background::run_experiment(preset),
        "gluing" => gluing::run_experiment(preset),
        "loss-profile" => loss_profile::run_experiment(preset),
        other => Err(Error::Config(format!(
            "unknown experiment '{other}' (expected one of {})",
            EXPERIMENT_NAMES.join(", ")
        ))),
    }
}

/// Step size hitting the target advective CFL for the given state, adjusted
/// so `t_end` is an integer number of steps of at least `min_steps`.
pub(crate) fn auto_dt_from_state(
    theta: &ScalarField,
    t_end: f64,
    target_cfl: f64,
    min_steps: usize,
) -> Result<f64> {
    let v = spectral::riesz_velocity(theta)?;
    Ok(auto_dt(theta.grid(), t_end, target_cfl, v.max_speed(), min_steps))
}

pub(crate) fn auto_dt(
    grid: Grid,
    t_end: f64,
    target_cfl: f64,
    max_speed: f64,
    min_steps: usize,
) -> f64 {
    let dx = grid.dx();
    let dt0 = if max_speed > 0.0 {
        target_cfl * dx / max_speed
    } else {
        t_end
    };
    let steps = (t_end / dt0).ceil().max(min_steps as f64);
    t_end / steps
}
