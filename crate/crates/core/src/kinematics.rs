//! Simple motion of both agents under heading controls, and the reduced
//! dynamics of their angular separation.

use crate::error::{Error, Result};
use crate::geometry::{
    relative_config, step_geodesic, Agent, GameParams, RelativeConfig, SurfacePoint,
};

/// Controls held over one step. Headings are measured in the instantaneous
/// great-circle frame (zero = along the circle, closing for `P`, opening for `E`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    pub pursuer_heading: f64,
    pub evader_heading: f64,
    pub evader_speed: f64,
}

/// Relative slack allowed on `v_E <= mu v_P` before a control is rejected.
const SPEED_SLACK: f64 = 1e-12;

impl ControlInput {
    pub fn validate(&self, params: &GameParams) -> Result<()> {
        let vmax = params.evader_max_speed();
        if !(self.evader_speed >= 0.0 && self.evader_speed <= vmax * (1.0 + SPEED_SLACK)) {
            return Err(Error::Inadmissible(format!(
                "evader speed {} outside [0, {vmax}]",
                self.evader_speed
            )));
        }
        if !(self.pursuer_heading.is_finite() && self.evader_heading.is_finite()) {
            return Err(Error::Inadmissible("non-finite heading".into()));
        }
        Ok(())
    }
}

/// Rate of change of the angular separation for `alpha` in `(0, pi)`.
pub fn alpha_rate(ctrl: &ControlInput, params: &GameParams) -> f64 {
    (ctrl.evader_speed * ctrl.evader_heading.cos()
        - params.pursuer_speed * ctrl.pursuer_heading.cos())
        / params.radius
}

/// Moves both agents for `dt` along the geodesics of their current velocities.
pub fn advance(
    p: &SurfacePoint,
    e: &SurfacePoint,
    ctrl: &ControlInput,
    dt: f64,
    params: &GameParams,
) -> Result<(SurfacePoint, SurfacePoint)> {
    let cfg = relative_config(p, e);
    advance_in(p, e, &cfg, ctrl, dt, params)
}

/// [`advance`] with a precomputed relative configuration.
pub fn advance_in(
    p: &SurfacePoint,
    e: &SurfacePoint,
    cfg: &RelativeConfig,
    ctrl: &ControlInput,
    dt: f64,
    params: &GameParams,
) -> Result<(SurfacePoint, SurfacePoint)> {
    let vp = cfg.velocity(Agent::Pursuer, ctrl.pursuer_heading, 1.0)?;
    let ve = cfg.velocity(Agent::Evader, ctrl.evader_heading, 1.0)?;
    Ok((
        step_geodesic(p, &vp, params.pursuer_speed * dt)?,
        step_geodesic(e, &ve, ctrl.evader_speed * dt)?,
    ))
}
