//! Scenario documents: parsing, validation, emission, and execution.
//!
//! A scenario is a TOML document with a `mode` and the blocks that mode
//! needs. Angles are radians; on input they may also be strings with an
//! explicit `deg` or `rad` suffix (`"30deg"`). Parsing fills every default,
//! so [`emit`] always writes a fully specified document.
//!
//! ```toml
//! mode = "simulate"
//!
//! [params]
//! radius = 1.0
//! pursuer_speed = 1.0
//! mu = 0.5
//!
//! [evader]
//! phi = "90deg"
//! theta = 0.0
//!
//! [pursuer]
//! phi = 0.5
//! theta = 0.0
//! ```

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::apollonius::{
    critical_alpha, intercept_point, ApolloniusBoundary, Regime, DEFAULT_SAMPLES,
};
use crate::engagements::{
    evader_wins_guarding, guarding_alpha_threshold, pursuer_wins_guarding,
    two_pursuer_intercept_at, GeodesicParallelPursuer, PolylineEvader, TargetRegion,
    TwoPursuerConfig,
};
use crate::error::Error;
use crate::geometry::{
    direction_toward, dispersal_basis, relative_config, step_geodesic, GameParams, SurfacePoint,
};
use crate::sim::{
    self, CaptureTolerance, EquilibriumEvader, EquilibriumPursuer, SimConfig, DEFAULT_CAPTURE_TOL,
};
use crate::strategies::value;

/// Arc distance (times `R`) under which an intercept counts as on the boundary.
pub const ON_BOUNDARY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Simulate,
    Apollonius,
    Intercept,
    TwoPursuer,
    Guard,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Apollonius => "apollonius",
            Mode::Intercept => "intercept",
            Mode::TwoPursuer => "two_pursuer",
            Mode::Guard => "guard",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Latitude and longitude on the sphere, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Position {
    #[serde(deserialize_with = "angle")]
    pub phi: f64,
    #[serde(deserialize_with = "angle")]
    pub theta: f64,
}

impl Position {
    pub fn point(&self, radius: f64) -> SurfacePoint {
        SurfacePoint::from_spherical(self.phi, self.theta, radius)
    }
}

/// Second pursuer: position plus its own speed and speed ratio. The sphere
/// radius is shared with `[params]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondPursuer {
    #[serde(deserialize_with = "angle")]
    pub phi: f64,
    #[serde(deserialize_with = "angle")]
    pub theta: f64,
    pub pursuer_speed: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimBlock {
    pub dt: f64,
    /// Filled with `4 V(pi)` at parse time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_time: Option<f64>,
    /// Radians, or `"step"` for the per-step tolerance.
    #[serde(with = "capture_tol")]
    pub capture_tol: CaptureTolerance,
    #[serde(deserialize_with = "angle")]
    pub tie_break: f64,
}

impl Default for SimBlock {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            max_time: None,
            capture_tol: CaptureTolerance::Fixed(DEFAULT_CAPTURE_TOL),
            tie_break: 0.0,
        }
    }
}

impl SimBlock {
    pub fn config(&self) -> SimConfig {
        let mut cfg = SimConfig::new(self.dt)
            .with_capture_tol(self.capture_tol)
            .with_tie_break(self.tie_break);
        cfg.max_time = self.max_time;
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApolloniusBlock {
    pub n_samples: usize,
    /// Separations to sweep; empty means the separation of the given agents.
    #[serde(deserialize_with = "angles")]
    pub alphas: Vec<f64>,
}

impl Default for ApolloniusBlock {
    fn default() -> Self {
        Self {
            n_samples: DEFAULT_SAMPLES,
            alphas: Vec::new(),
        }
    }
}

/// Spherical cap to guard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetBlock {
    #[serde(deserialize_with = "angle")]
    pub phi: f64,
    #[serde(deserialize_with = "angle")]
    pub theta: f64,
    #[serde(deserialize_with = "angle")]
    pub angular_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GuardBlock {
    /// Seed of the random evader polyline played against the guard.
    pub seed: u64,
    pub segments: usize,
}

impl Default for GuardBlock {
    fn default() -> Self {
        Self {
            seed: 0,
            segments: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub mode: Mode,
    pub params: GameParams,
    pub evader: Position,
    pub pursuer: Position,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pursuer2: Option<SecondPursuer>,
    #[serde(default)]
    pub sim: SimBlock,
    #[serde(default)]
    pub apollonius: ApolloniusBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetBlock>,
    #[serde(default)]
    pub guard: GuardBlock,
}

impl Scenario {
    pub fn evader_point(&self) -> SurfacePoint {
        self.evader.point(self.params.radius)
    }

    pub fn pursuer_point(&self) -> SurfacePoint {
        self.pursuer.point(self.params.radius)
    }

    /// Two-pursuer configuration in the evader-at-north-pole frame.
    pub fn two_pursuer_config(&self) -> Result<TwoPursuerConfig, ScenarioError> {
        let p2 = self
            .pursuer2
            .ok_or_else(|| ScenarioError::new("pursuer2", "missing block"))?;
        let params2 = GameParams::new(self.params.radius, p2.pursuer_speed, p2.mu)
            .map_err(|e| ScenarioError::new("pursuer2", e.to_string()))?;
        let p2_point = SurfacePoint::from_spherical(p2.phi, p2.theta, self.params.radius);
        TwoPursuerConfig::from_positions(
            &self.evader_point(),
            &self.pursuer_point(),
            &p2_point,
            self.params,
            params2,
        )
        .map_err(|e| ScenarioError::new("pursuer2", e.to_string()))
    }
}

/// A rejected scenario document, with the key path at fault.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioError {
    pub path: String,
    pub message: String,
}

impl ScenarioError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ScenarioError {}

/// Parses, validates, and fills defaults.
pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
    let de = toml::Deserializer::new(text);
    let mut s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ScenarioError::new(path, e.into_inner().message().trim().to_string())
    })?;
    validate(&s)?;
    if s.sim.max_time.is_none() {
        s.sim.max_time = Some(4.0 * value(PI, &s.params).expect("pi is in range"));
    }
    Ok(s)
}

pub fn parse_file(path: &Path) -> Result<Scenario, RunError> {
    let text = fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse(&text).map_err(|e| RunError::Scenario {
        path: Some(path.to_owned()),
        source: e,
    })
}

/// Serializes a valid scenario; [`parse`] reads it back unchanged.
pub fn emit(s: &Scenario) -> Result<String, ScenarioError> {
    validate(s)?;
    toml::to_string(s).map_err(|e| ScenarioError::new("", e.to_string()))
}

fn check(ok: bool, path: &str, message: impl FnOnce() -> String) -> Result<(), ScenarioError> {
    if ok {
        Ok(())
    } else {
        Err(ScenarioError::new(path, message()))
    }
}

fn check_position(path: &str, phi: f64, theta: f64) -> Result<(), ScenarioError> {
    check(
        (-FRAC_PI_2..=FRAC_PI_2).contains(&phi),
        &format!("{path}.phi"),
        || format!("latitude {phi} outside [-pi/2, pi/2]"),
    )?;
    check(theta.is_finite(), &format!("{path}.theta"), || {
        format!("longitude {theta} is not finite")
    })
}

pub fn validate(s: &Scenario) -> Result<(), ScenarioError> {
    let p = &s.params;
    check(
        p.radius.is_finite() && p.radius > 0.0,
        "params.radius",
        || format!("must be > 0, got {}", p.radius),
    )?;
    check(
        p.pursuer_speed.is_finite() && p.pursuer_speed > 0.0,
        "params.pursuer_speed",
        || format!("must be > 0, got {}", p.pursuer_speed),
    )?;
    check(p.mu > 0.0 && p.mu < 1.0, "params.mu", || {
        format!("must lie in (0, 1), got {}", p.mu)
    })?;
    check_position("evader", s.evader.phi, s.evader.theta)?;
    check_position("pursuer", s.pursuer.phi, s.pursuer.theta)?;

    if let Some(p2) = &s.pursuer2 {
        check_position("pursuer2", p2.phi, p2.theta)?;
        check(
            p2.pursuer_speed.is_finite() && p2.pursuer_speed > 0.0,
            "pursuer2.pursuer_speed",
            || format!("must be > 0, got {}", p2.pursuer_speed),
        )?;
        check(p2.mu > 0.0 && p2.mu < 1.0, "pursuer2.mu", || {
            format!("must lie in (0, 1), got {}", p2.mu)
        })?;
    }

    let sim = &s.sim;
    check(sim.dt.is_finite() && sim.dt > 0.0, "sim.dt", || {
        format!("must be > 0, got {}", sim.dt)
    })?;
    if let Some(m) = sim.max_time {
        check(m.is_finite() && m > 0.0, "sim.max_time", || {
            format!("must be > 0, got {m}")
        })?;
    }
    if let CaptureTolerance::Fixed(tol) = sim.capture_tol {
        check(
            tol.is_finite() && tol > 0.0 && tol < PI,
            "sim.capture_tol",
            || format!("must lie in (0, pi), got {tol}"),
        )?;
    }
    check(sim.tie_break.is_finite(), "sim.tie_break", || {
        format!("not finite: {}", sim.tie_break)
    })?;

    let ap = &s.apollonius;
    check(ap.n_samples >= 8, "apollonius.n_samples", || {
        format!("must be >= 8, got {}", ap.n_samples)
    })?;
    for (k, a) in ap.alphas.iter().enumerate() {
        check(
            *a > 0.0 && *a < PI,
            &format!("apollonius.alphas[{k}]"),
            || format!("separation {a} outside (0, pi)"),
        )?;
    }

    if let Some(t) = &s.target {
        check_position("target", t.phi, t.theta)?;
        check(
            t.angular_radius > 0.0 && t.angular_radius < PI,
            "target.angular_radius",
            || format!("must lie in (0, pi), got {}", t.angular_radius),
        )?;
    }
    check(s.guard.seed <= i64::MAX as u64, "guard.seed", || {
        format!("must fit a TOML integer, got {}", s.guard.seed)
    })?;
    check(s.guard.segments >= 1, "guard.segments", || {
        "must be >= 1".to_string()
    })?;

    match s.mode {
        Mode::TwoPursuer => check(s.pursuer2.is_some(), "pursuer2", || {
            "required in two_pursuer mode".to_string()
        }),
        Mode::Guard => check(s.target.is_some(), "target", || {
            "required in guard mode".to_string()
        }),
        _ => Ok(()),
    }
}

/// Anything that stops [`execute`].
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{}{source}", path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    Scenario {
        path: Option<PathBuf>,
        source: ScenarioError,
    },
    #[error("{context}: {source}")]
    Model { context: String, source: Error },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    /// 0 success, 1 usage, 2 numerical breakdown.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Model { source, .. } if source.is_numerical() => 2,
            _ => 1,
        }
    }
}

fn model<T>(context: impl Into<String>, r: crate::Result<T>) -> Result<T, RunError> {
    r.map_err(|source| RunError::Model {
        context: context.into(),
        source,
    })
}

fn usage(path: &str, message: impl Into<String>) -> RunError {
    RunError::Scenario {
        path: None,
        source: ScenarioError::new(path, message),
    }
}

fn write_file<F>(
    dir: &Path,
    name: &str,
    written: &mut Vec<PathBuf>,
    body: F,
) -> Result<(), RunError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let path = dir.join(name);
    let io_err = |source| RunError::Io {
        path: path.clone(),
        source,
    };
    let mut w = BufWriter::new(File::create(&path).map_err(io_err)?);
    body(&mut w).and_then(|_| w.flush()).map_err(io_err)?;
    written.push(path);
    Ok(())
}

/// Runs the scenario and writes its artifacts into `out_dir`, which is
/// created if needed. Returns the files written, in order.
pub fn execute(s: &Scenario, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    validate(s).map_err(|source| RunError::Scenario { path: None, source })?;
    fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_owned(),
        source,
    })?;
    let mut written = Vec::new();
    match s.mode {
        Mode::Simulate => run_simulate(s, out_dir, &mut written)?,
        Mode::Apollonius => run_apollonius(s, out_dir, &mut written)?,
        Mode::Intercept => run_intercept(s, out_dir, &mut written)?,
        Mode::TwoPursuer => run_two_pursuer(s, out_dir, &mut written)?,
        Mode::Guard => run_guard(s, out_dir, &mut written)?,
    }
    Ok(written)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}"))
        .unwrap_or_else(|| "\"none\"".to_string())
}

fn run_simulate(s: &Scenario, dir: &Path, written: &mut Vec<PathBuf>) -> Result<(), RunError> {
    let (p, e) = (s.pursuer_point(), s.evader_point());
    let alpha0 = relative_config(&p, &e).alpha;
    let traj = model(
        "simulate",
        sim::run(
            &p,
            &e,
            &mut EquilibriumPursuer,
            &mut EquilibriumEvader,
            &s.sim.config(),
            &s.params,
        ),
    )?;
    let v = model("simulate", value(alpha0, &s.params))?;
    write_file(dir, "trajectory.csv", written, |w| traj.write_csv(w))?;
    write_file(dir, "trajectory.txt", written, |w| traj.write_records(w))?;
    write_file(dir, "summary.txt", written, |w| {
        writeln!(w, "mode = \"simulate\"")?;
        writeln!(w, "alpha0 = {alpha0:?}")?;
        writeln!(w, "value = {v:?}")?;
        writeln!(w, "capture_time = {}", opt(traj.capture_time))?;
        writeln!(w, "capped = {}", traj.capped)?;
        writeln!(w, "steps = {}", traj.advances())?;
        writeln!(w, "final_alpha = {:?}", traj.last().alpha)?;
        writeln!(w, "dt = {:?}", traj.dt)?;
        writeln!(w, "capture_tol = {:?}", traj.capture_tol)
    })
}

/// Pursuer at separation `alpha` from `e`, along the geodesic toward `toward`.
fn pursuer_at(e: &SurfacePoint, toward: &SurfacePoint, alpha: f64) -> crate::Result<SurfacePoint> {
    let dir = direction_toward(e, toward).unwrap_or_else(|_| dispersal_basis(e).0);
    step_geodesic(e, &dir, alpha * e.radius())
}

fn write_intercept_record<W: Write>(
    w: &mut W,
    p: &SurfacePoint,
    e: &SurfacePoint,
    b: &ApolloniusBoundary,
    params: &GameParams,
) -> Result<(), RunError> {
    let alpha = b.alpha();
    let ip = model("intercept", intercept_point(p, e, params))?;
    let nearest = model("intercept", b.nearest(&ip.point))?;
    let distance =
        crate::geometry::arc_length(&nearest.point, &ip.point).min(b.distance_to(&ip.point));
    let location = if distance <= ON_BOUNDARY_TOL * params.radius {
        "on_boundary"
    } else if b.contains(&ip.point) {
        "inside"
    } else {
        "outside"
    };
    let io_err = |source| RunError::Io {
        path: PathBuf::from("<record>"),
        source,
    };
    (|| -> io::Result<()> {
        writeln!(w, "alpha = {alpha:?}")?;
        writeln!(w, "critical_alpha = {:?}", critical_alpha(params))?;
        writeln!(
            w,
            "regime = \"{}\"",
            Regime::classify(alpha, params).as_str()
        )?;
        writeln!(w, "x = {:?}", ip.point.x())?;
        writeln!(w, "y = {:?}", ip.point.y())?;
        writeln!(w, "z = {:?}", ip.point.z())?;
        writeln!(w, "time = {:?}", ip.time)?;
        writeln!(w, "evader_arc = {:?}", ip.evader_arc)?;
        writeln!(w, "boundary_distance = {distance:?}")?;
        writeln!(w, "location = \"{location}\"")?;
        writeln!(w, "monotone = {}", b.is_monotone())
    })()
    .map_err(io_err)
}

fn nondegenerate(s: &Scenario) -> Result<(SurfacePoint, SurfacePoint), RunError> {
    let (p, e) = (s.pursuer_point(), s.evader_point());
    if relative_config(&p, &e).is_degenerate() {
        return Err(usage(
            "pursuer",
            "pursuer and evader must be neither coincident nor antipodal",
        ));
    }
    Ok((p, e))
}

fn run_apollonius(s: &Scenario, dir: &Path, written: &mut Vec<PathBuf>) -> Result<(), RunError> {
    let e = s.evader_point();
    let pursuers: Vec<SurfacePoint> = if s.apollonius.alphas.is_empty() {
        vec![nondegenerate(s)?.0]
    } else {
        let toward = s.pursuer_point();
        s.apollonius
            .alphas
            .iter()
            .map(|&a| model("apollonius", pursuer_at(&e, &toward, a)))
            .collect::<Result<_, _>>()?
    };
    for (k, p) in pursuers.iter().enumerate() {
        let ctx = format!("apollonius sample {k}");
        let b = model(
            ctx,
            ApolloniusBoundary::new(p, &e, &s.params, s.apollonius.n_samples),
        )?;
        write_file(dir, &format!("boundary_{k:02}.csv"), written, |w| {
            b.write_csv(w)
        })?;
        let mut record = Vec::new();
        write_intercept_record(&mut record, p, &e, &b, &s.params)?;
        write_file(dir, &format!("intercept_{k:02}.txt"), written, |w| {
            w.write_all(&record)
        })?;
    }
    Ok(())
}

fn run_intercept(s: &Scenario, dir: &Path, written: &mut Vec<PathBuf>) -> Result<(), RunError> {
    let (p, e) = nondegenerate(s)?;
    let b = model(
        "intercept",
        ApolloniusBoundary::new(&p, &e, &s.params, s.apollonius.n_samples),
    )?;
    let mut record = Vec::new();
    write_intercept_record(&mut record, &p, &e, &b, &s.params)?;
    write_file(dir, "intercept.txt", written, |w| w.write_all(&record))
}

fn run_two_pursuer(s: &Scenario, dir: &Path, written: &mut Vec<PathBuf>) -> Result<(), RunError> {
    let cfg = s
        .two_pursuer_config()
        .map_err(|source| RunError::Scenario { path: None, source })?;
    let p2 = s.pursuer2.expect("validated");
    let params2 = cfg.pursuer_2;
    let (e, p1) = (s.evader_point(), s.pursuer_point());
    let p2 = SurfacePoint::from_spherical(p2.phi, p2.theta, s.params.radius);
    let n = s.apollonius.n_samples;
    let result = model(
        "two_pursuer",
        two_pursuer_intercept_at(&e, &p1, &p2, &s.params, &params2, n),
    )?;
    let b1 = model(
        "two_pursuer",
        ApolloniusBoundary::new(&p1, &e, &s.params, n),
    )?;
    let b2 = model("two_pursuer", ApolloniusBoundary::new(&p2, &e, &params2, n))?;
    write_file(dir, "two_pursuer.txt", written, |w| {
        writeln!(w, "alpha_1 = {:?}", cfg.alpha_1)?;
        writeln!(w, "alpha_2 = {:?}", cfg.alpha_2)?;
        writeln!(w, "lambda_o = {:?}", cfg.lambda_o)?;
        result.write_record(w)
    })?;
    write_file(dir, "boundary_p1.csv", written, |w| b1.write_csv(w))?;
    write_file(dir, "boundary_p2.csv", written, |w| b2.write_csv(w))
}

fn run_guard(s: &Scenario, dir: &Path, written: &mut Vec<PathBuf>) -> Result<(), RunError> {
    let (p, e) = nondegenerate(s)?;
    let t = s.target.expect("validated");
    let target = model(
        "guard",
        TargetRegion::new(
            SurfacePoint::from_spherical(t.phi, t.theta, s.params.radius),
            t.angular_radius,
        ),
    )?;
    let alpha = relative_config(&p, &e).alpha;
    let b = model(
        "guard",
        ApolloniusBoundary::new(&p, &e, &s.params, s.apollonius.n_samples),
    )?;
    let evader_wins = evader_wins_guarding(&b, &target);
    let pursuer_wins = pursuer_wins_guarding(&b, &target, alpha, &s.params);

    let horizon = model("guard", value(alpha, &s.params))?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.guard.seed);
    let mut evader = model(
        "guard",
        PolylineEvader::random(&mut rng, s.guard.segments, horizon),
    )?;
    let traj = model(
        "guard playout",
        sim::run(
            &p,
            &e,
            &mut GeodesicParallelPursuer,
            &mut evader,
            &s.sim.config(),
            &s.params,
        ),
    )?;
    let target_reached = traj.steps.iter().any(|r| target.contains(&r.evader));

    write_file(dir, "guard.txt", written, |w| {
        writeln!(w, "alpha = {alpha:?}")?;
        writeln!(
            w,
            "alpha_threshold = {:?}",
            guarding_alpha_threshold(&s.params)
        )?;
        writeln!(w, "evader_wins = {evader_wins}")?;
        writeln!(w, "pursuer_wins = {pursuer_wins}")?;
        writeln!(w, "seed = {}", s.guard.seed)?;
        writeln!(w, "segments = {}", s.guard.segments)?;
        writeln!(w, "value = {horizon:?}")?;
        writeln!(w, "capture_time = {}", opt(traj.capture_time))?;
        writeln!(w, "capped = {}", traj.capped)?;
        writeln!(w, "target_reached = {target_reached}")
    })?;
    write_file(dir, "guard_trajectory.csv", written, |w| traj.write_csv(w))
}

/// Parses a number of radians or a string with a `deg` / `rad` suffix.
pub fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim();
    let (num, scale) = match t.strip_suffix("deg") {
        Some(n) => (n, PI / 180.0),
        None => (t.strip_suffix("rad")?, 1.0),
    };
    let v: f64 = num.trim().parse().ok()?;
    let v = v * scale;
    v.is_finite().then_some(v)
}

struct AngleVisitor;

impl<'de> Visitor<'de> for AngleVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an angle in radians or a string such as \"30deg\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        parse_angle(v).ok_or_else(|| {
            E::custom(format!(
                "bad angle {v:?}: expected a number with a deg or rad suffix"
            ))
        })
    }
}

fn angle<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    d.deserialize_any(AngleVisitor)
}

fn angles<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    struct A(#[serde(deserialize_with = "angle")] f64);
    Ok(Vec::<A>::deserialize(d)?.into_iter().map(|a| a.0).collect())
}

mod capture_tol {
    use super::*;

    const PER_STEP: &str = "step";

    pub fn serialize<S: Serializer>(tol: &CaptureTolerance, s: S) -> Result<S::Ok, S::Error> {
        match tol {
            CaptureTolerance::Fixed(v) => s.serialize_f64(*v),
            CaptureTolerance::PerStep => s.serialize_str(PER_STEP),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CaptureTolerance, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = CaptureTolerance;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a tolerance in radians or \"step\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<CaptureTolerance, E> {
                Ok(CaptureTolerance::Fixed(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<CaptureTolerance, E> {
                Ok(CaptureTolerance::Fixed(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<CaptureTolerance, E> {
                if v == PER_STEP {
                    Ok(CaptureTolerance::PerStep)
                } else {
                    Err(E::custom(format!(
                        "expected a number or \"{PER_STEP}\", got {v:?}"
                    )))
                }
            }
        }
        d.deserialize_any(V)
    }
}
