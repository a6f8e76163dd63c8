//! Time-stepped playouts with capture detection and trajectory recording.
//!
//! Controls are piecewise constant over a step and motion within a step is an
//! exact geodesic arc, so the separation can be tracked continuously inside
//! each step: capture is declared at the first instant the separation drops to
//! the capture tolerance, not merely at step boundaries.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::{
    dispersal_basis, relative_config, step_geodesic, Agent, GameParams, RelativeConfig,
    SurfacePoint, Vec3,
};
use crate::kinematics::ControlInput;
use crate::roots::golden_min;
use crate::strategies::{dispersal_controls, value};

/// Fixed capture tolerance used when none is configured (radians).
pub const DEFAULT_CAPTURE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaptureTolerance {
    /// Fixed angular separation in radians.
    Fixed(f64),
    /// The separation closed in one step of equilibrium play, `(1 - mu) v_P dt / R`.
    PerStep,
}

impl CaptureTolerance {
    pub fn radians(&self, dt: f64, params: &GameParams) -> f64 {
        match *self {
            CaptureTolerance::Fixed(tol) => tol,
            CaptureTolerance::PerStep => {
                (1.0 - params.mu) * params.pursuer_speed * dt / params.radius
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    /// Defaults to `4 V(pi)` when `None`.
    pub max_time: Option<f64>,
    pub capture_tol: CaptureTolerance,
    /// Pursuer heading at the antipodal configuration.
    pub tie_break: f64,
}

impl SimConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            max_time: None,
            capture_tol: CaptureTolerance::Fixed(DEFAULT_CAPTURE_TOL),
            tie_break: 0.0,
        }
    }

    pub fn with_capture_tol(mut self, tol: CaptureTolerance) -> Self {
        self.capture_tol = tol;
        self
    }

    pub fn with_tie_break(mut self, tie_break: f64) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn with_max_time(mut self, max_time: f64) -> Self {
        self.max_time = Some(max_time);
        self
    }

    pub fn resolved_max_time(&self, params: &GameParams) -> f64 {
        self.max_time
            .unwrap_or_else(|| 4.0 * value(PI, params).expect("pi is in range"))
    }
}

/// Everything a policy may observe.
#[derive(Debug, Clone, Copy)]
pub struct GameState {
    pub t: f64,
    pub step: usize,
    pub pursuer: SurfacePoint,
    pub evader: SurfacePoint,
    pub config: RelativeConfig,
    pub params: GameParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaderControl {
    pub speed: f64,
    pub heading: f64,
}

pub trait EvaderPolicy {
    fn control(&mut self, state: &GameState) -> Result<EvaderControl>;
}

/// The pursuer moves second within a step and sees the evader's control.
pub trait PursuerPolicy {
    fn heading(&mut self, state: &GameState, evader: &EvaderControl) -> Result<f64>;
}

impl<F: FnMut(&GameState) -> EvaderControl> EvaderPolicy for F {
    fn control(&mut self, state: &GameState) -> Result<EvaderControl> {
        Ok(self(state))
    }
}

impl<F: FnMut(&GameState, &EvaderControl) -> f64> PursuerPolicy for F {
    fn heading(&mut self, state: &GameState, evader: &EvaderControl) -> Result<f64> {
        Ok(self(state, evader))
    }
}

/// Full-speed flight along the great circle.
#[derive(Debug, Clone, Copy, Default)]
pub struct EquilibriumEvader;

impl EvaderPolicy for EquilibriumEvader {
    fn control(&mut self, state: &GameState) -> Result<EvaderControl> {
        Ok(EvaderControl {
            speed: state.params.evader_max_speed(),
            heading: 0.0,
        })
    }
}

/// Pure pursuit along the great circle.
#[derive(Debug, Clone, Copy, Default)]
pub struct EquilibriumPursuer;

impl PursuerPolicy for EquilibriumPursuer {
    fn heading(&mut self, _state: &GameState, _evader: &EvaderControl) -> Result<f64> {
        Ok(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub pursuer: SurfacePoint,
    pub evader: SurfacePoint,
    pub alpha: f64,
    /// Control held from `t` until the next record; `None` on the final record.
    pub control: Option<ControlInput>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub capture_tol: f64,
    pub steps: Vec<StepRecord>,
    pub capture_time: Option<f64>,
    pub capped: bool,
}

impl Trajectory {
    /// Number of control steps taken (records minus the terminal one).
    pub fn advances(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn last(&self) -> &StepRecord {
        self.steps
            .last()
            .expect("a trajectory always holds its terminal record")
    }

    pub const COLUMNS: [&'static str; 11] = [
        "t", "Px", "Py", "Pz", "Ex", "Ey", "Ez", "alpha", "u_P", "u_E", "v_E",
    ];

    fn fields(rec: &StepRecord) -> [String; 11] {
        let (up, ue, ve) = match rec.control {
            Some(c) => (
                format!("{:?}", c.pursuer_heading),
                format!("{:?}", c.evader_heading),
                format!("{:?}", c.evader_speed),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        [
            format!("{:?}", rec.t),
            format!("{:?}", rec.pursuer.x()),
            format!("{:?}", rec.pursuer.y()),
            format!("{:?}", rec.pursuer.z()),
            format!("{:?}", rec.evader.x()),
            format!("{:?}", rec.evader.y()),
            format!("{:?}", rec.evader.z()),
            format!("{:?}", rec.alpha),
            up,
            ue,
            ve,
        ]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::COLUMNS.join(","))?;
        for rec in &self.steps {
            writeln!(w, "{}", Self::fields(rec).join(","))?;
        }
        Ok(())
    }

    /// Header block of `key = value` lines, then one `key=value ...` line per record.
    /// Control fields are omitted from the terminal record.
    pub fn write_records<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "dt = {:?}", self.dt)?;
        writeln!(w, "capture_tol = {:?}", self.capture_tol)?;
        match self.capture_time {
            Some(t) => writeln!(w, "capture_time = {t:?}")?,
            None => writeln!(w, "capture_time = \"none\"")?,
        }
        writeln!(w, "capped = {}", self.capped)?;
        writeln!(w, "records = {}", self.steps.len())?;
        for rec in &self.steps {
            let line = Self::COLUMNS
                .iter()
                .zip(Self::fields(rec))
                .filter(|(_, v)| !v.is_empty())
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Straight-line motion of both agents over one step.
struct StepMotion {
    p: SurfacePoint,
    e: SurfacePoint,
    p_dir: Vec3,
    e_dir: Option<Vec3>,
    p_speed: f64,
    e_speed: f64,
}

impl StepMotion {
    fn at(&self, s: f64) -> Result<(SurfacePoint, SurfacePoint)> {
        let p = step_geodesic(&self.p, &self.p_dir, self.p_speed * s)?;
        let e = match &self.e_dir {
            Some(d) => step_geodesic(&self.e, d, self.e_speed * s)?,
            None => self.e,
        };
        Ok((p, e))
    }

    fn alpha_at(&self, s: f64) -> f64 {
        self.at(s)
            .map(|(p, e)| relative_config(&p, &e).alpha)
            .unwrap_or(f64::INFINITY)
    }
}

/// Plays out one engagement until capture or `max_time`.
pub fn run<EP: EvaderPolicy + ?Sized, PP: PursuerPolicy + ?Sized>(
    p0: &SurfacePoint,
    e0: &SurfacePoint,
    pursuer: &mut PP,
    evader: &mut EP,
    config: &SimConfig,
    params: &GameParams,
) -> Result<Trajectory> {
    let dt = config.dt;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "time step must be > 0, got {dt}"
        )));
    }
    let eps = config.capture_tol.radians(dt, params);
    let max_time = config.resolved_max_time(params);
    let closing_bound = (params.pursuer_speed + params.evader_max_speed()) / params.radius;

    let mut traj = Trajectory {
        dt,
        capture_tol: eps,
        steps: Vec::new(),
        capture_time: None,
        capped: false,
    };
    let (mut p, mut e) = (*p0, *e0);
    let mut step = 0usize;

    loop {
        let t = step as f64 * dt;
        let cfg = relative_config(&p, &e);
        if cfg.alpha <= eps {
            traj.steps.push(StepRecord {
                t,
                pursuer: p,
                evader: e,
                alpha: cfg.alpha,
                control: None,
            });
            traj.capture_time = Some(t);
            return Ok(traj);
        }
        if t >= max_time {
            traj.steps.push(StepRecord {
                t,
                pursuer: p,
                evader: e,
                alpha: cfg.alpha,
                control: None,
            });
            traj.capped = true;
            return Ok(traj);
        }

        let (ctrl, motion) = if cfg.is_antipodal() {
            let ctrl = dispersal_controls(config.tie_break, params);
            let (tb, nb) = dispersal_basis(&p);
            let (s, c) = config.tie_break.sin_cos();
            let motion = StepMotion {
                p,
                e,
                p_dir: c * tb + s * nb,
                e_dir: None,
                p_speed: params.pursuer_speed,
                e_speed: 0.0,
            };
            (ctrl, motion)
        } else {
            let state = GameState {
                t,
                step,
                pursuer: p,
                evader: e,
                config: cfg,
                params: *params,
            };
            let ec = evader.control(&state)?;
            let heading = pursuer.heading(&state, &ec)?;
            let ctrl = ControlInput {
                pursuer_heading: heading,
                evader_heading: ec.heading,
                evader_speed: ec.speed,
            };
            ctrl.validate(params)
                .map_err(|err| Error::PolicyViolation {
                    step,
                    t,
                    reason: err.to_string(),
                })?;
            let motion = StepMotion {
                p,
                e,
                p_dir: cfg.velocity(Agent::Pursuer, heading, 1.0)?,
                e_dir: Some(cfg.velocity(Agent::Evader, ec.heading, 1.0)?),
                p_speed: params.pursuer_speed,
                e_speed: ec.speed,
            };
            (ctrl, motion)
        };
        traj.steps.push(StepRecord {
            t,
            pursuer: p,
            evader: e,
            alpha: cfg.alpha,
            control: Some(ctrl),
        });

        // separation can shrink by at most closing_bound * dt within the step
        if cfg.alpha - closing_bound * dt <= eps {
            if let Some(s) = first_crossing(&motion, dt, eps) {
                let (pc, ec) = motion.at(s)?;
                let tc = t + s;
                traj.steps.push(StepRecord {
                    t: tc,
                    pursuer: pc,
                    evader: ec,
                    alpha: relative_config(&pc, &ec).alpha,
                    control: None,
                });
                traj.capture_time = Some(tc);
                return Ok(traj);
            }
        }
        let (pn, en) = motion.at(dt)?;
        p = pn;
        e = en;
        step += 1;
    }
}

/// Earliest `s` in `(0, dt]` with separation at most `eps`, if any.
fn first_crossing(motion: &StepMotion, dt: f64, eps: f64) -> Option<f64> {
    let end = motion.alpha_at(dt);
    let (s_min, a_min) = if end <= eps {
        (dt, end)
    } else {
        golden_min(|s| motion.alpha_at(s), 0.0, dt, dt * 1e-12)
    };
    if a_min > eps {
        return None;
    }
    // keep the upper end on the captured side of the threshold
    let (mut lo, mut hi) = (0.0, s_min);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if motion.alpha_at(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}
