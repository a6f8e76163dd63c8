//! Equilibrium feedback strategies, the value function, and the rate-of-loss
//! used to settle the antipodal (dispersal) configuration.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{GameParams, RelativeConfig};
use crate::kinematics::ControlInput;

/// Capture time under equilibrium play, `R alpha / ((1 - mu) v_P)`.
pub fn value(alpha: f64, params: &GameParams) -> Result<f64> {
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    Ok(params.radius * alpha / ((1.0 - params.mu) * params.pursuer_speed))
}

/// Saddle-point controls for every configuration with `alpha > 0`.
///
/// Interior configurations play pure pursuit against a full-speed flight
/// along the great circle. At `alpha = pi` the choice is delegated to
/// [`dispersal_controls`] with the given tie-break heading.
pub fn equilibrium_controls(
    cfg: &RelativeConfig,
    params: &GameParams,
    tie_break: f64,
) -> Result<ControlInput> {
    if cfg.is_degenerate() {
        if cfg.is_antipodal() {
            return Ok(dispersal_controls(tie_break, params));
        }
        return Err(Error::Captured);
    }
    Ok(ControlInput {
        pursuer_heading: 0.0,
        evader_heading: 0.0,
        evader_speed: params.evader_max_speed(),
    })
}

/// Pursuer commits to `tie_break`, evader holds still.
///
/// `tie_break` is measured in the basis of [`crate::geometry::dispersal_basis`].
pub fn dispersal_controls(tie_break: f64, _params: &GameParams) -> ControlInput {
    ControlInput {
        pursuer_heading: tie_break,
        evader_heading: 0.0,
        evader_speed: 0.0,
    }
}

/// Instantaneous rate-of-loss of the evader at the antipodal configuration,
/// after the zero hold-time limit: `(mu - (v_E / v_P) cos u_E) / (1 - mu)`.
pub fn rate_of_loss(evader_speed: f64, evader_heading: f64, params: &GameParams) -> Result<f64> {
    let vmax = params.evader_max_speed();
    if !(evader_speed >= 0.0 && evader_speed <= vmax * (1.0 + 1e-12)) {
        return Err(Error::Inadmissible(format!(
            "evader speed {evader_speed} outside [0, {vmax}]"
        )));
    }
    let mu = params.mu;
    Ok((mu - evader_speed / params.pursuer_speed * evader_heading.cos()) / (1.0 - mu))
}
