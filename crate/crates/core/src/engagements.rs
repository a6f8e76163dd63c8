//! Constructions built on Apollonius domains: the cooperative two-pursuer
//! intercept and the target-guarding game.

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::Rng;

use crate::apollonius::{
    boundary_point, contains, critical_alpha, heading_direction, intercept_point,
    ApolloniusBoundary, DEFAULT_SAMPLES, MEMBERSHIP_TOL,
};
use crate::error::{Error, Result};
use crate::geometry::{
    arc_length, direction_toward, relative_config, wrap_angle, Agent, GameParams, SurfacePoint,
    Vec3,
};
use crate::roots::bisect;
use crate::sim::{EvaderControl, EvaderPolicy, GameState, PursuerPolicy};

/// Fewest boundary samples accepted for intersection scans.
pub const MIN_INTERSECTION_SAMPLES: usize = 361;

/// Two pursuers against one evader placed at the north pole.
///
/// `P1` sits at colatitude `alpha_1` on longitude zero, `P2` at colatitude
/// `alpha_2` on longitude `lambda_o`. Both pursuers share the sphere radius
/// and the evader's top speed `mu_i v_Pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPursuerConfig {
    pub alpha_1: f64,
    pub alpha_2: f64,
    pub lambda_o: f64,
    pub pursuer_1: GameParams,
    pub pursuer_2: GameParams,
}

impl TwoPursuerConfig {
    pub fn new(
        alpha_1: f64,
        alpha_2: f64,
        lambda_o: f64,
        pursuer_1: GameParams,
        pursuer_2: GameParams,
    ) -> Result<Self> {
        for (i, a) in [alpha_1, alpha_2].into_iter().enumerate() {
            if !(a > 0.0 && a < PI) {
                return Err(Error::InvalidParams(format!(
                    "alpha_{} = {a} outside (0, pi)",
                    i + 1
                )));
            }
        }
        let (r1, r2) = (pursuer_1.radius, pursuer_2.radius);
        if (r1 - r2).abs() > 1e-12 * r1 {
            return Err(Error::InvalidParams(format!(
                "pursuers disagree on sphere radius ({r1} vs {r2})"
            )));
        }
        let (v1, v2) = (pursuer_1.evader_max_speed(), pursuer_2.evader_max_speed());
        if (v1 - v2).abs() > 1e-12 * v1 {
            return Err(Error::InvalidParams(format!(
                "pursuers disagree on evader speed ({v1} vs {v2})"
            )));
        }
        Ok(Self {
            alpha_1,
            alpha_2,
            lambda_o,
            pursuer_1,
            pursuer_2,
        })
    }

    /// Reads the offsets off arbitrary positions: `lambda_o` is the angle at
    /// `E` from the direction of `P1` to that of `P2`.
    pub fn from_positions(
        e: &SurfacePoint,
        p1: &SurfacePoint,
        p2: &SurfacePoint,
        pursuer_1: GameParams,
        pursuer_2: GameParams,
    ) -> Result<Self> {
        let d1 = direction_toward(e, p1)?;
        let d2 = direction_toward(e, p2)?;
        let lambda_o = d1.cross(&d2).dot(&e.unit()).atan2(d1.dot(&d2));
        Self::new(
            relative_config(p1, e).alpha,
            relative_config(p2, e).alpha,
            lambda_o,
            pursuer_1,
            pursuer_2,
        )
    }

    pub fn radius(&self) -> f64 {
        self.pursuer_1.radius
    }

    pub fn evader_speed(&self) -> f64 {
        self.pursuer_1.evader_max_speed()
    }

    /// `(E, P1, P2)`.
    pub fn positions(&self) -> (SurfacePoint, SurfacePoint, SurfacePoint) {
        let r = self.radius();
        (
            SurfacePoint::north_pole(r),
            SurfacePoint::from_spherical(0.5 * PI - self.alpha_1, 0.0, r),
            SurfacePoint::from_spherical(0.5 * PI - self.alpha_2, self.lambda_o, r),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterceptCase {
    P1Solo,
    P2Solo,
    JointBoundary,
}

impl InterceptCase {
    pub fn tag(&self) -> &'static str {
        match self {
            InterceptCase::P1Solo => "P1_solo",
            InterceptCase::P2Solo => "P2_solo",
            InterceptCase::JointBoundary => "joint_boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterceptResult {
    pub point: SurfacePoint,
    /// Evader arrival time at `point`.
    pub time: f64,
    pub case: InterceptCase,
    pub pursuer_times: [f64; 2],
    pub pursuer_distances: [f64; 2],
    pub evader_distance: f64,
    /// Set when neither boundary crossed the other and the inner domain's
    /// pursuer was chosen.
    pub nested_fallback: bool,
}

impl InterceptResult {
    /// `key = value` record.
    pub fn write_record<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "case_tag = \"{}\"", self.case.tag())?;
        writeln!(w, "x = {:?}", self.point.x())?;
        writeln!(w, "y = {:?}", self.point.y())?;
        writeln!(w, "z = {:?}", self.point.z())?;
        writeln!(w, "evader_time = {:?}", self.time)?;
        writeln!(w, "p1_time = {:?}", self.pursuer_times[0])?;
        writeln!(w, "p2_time = {:?}", self.pursuer_times[1])?;
        writeln!(w, "evader_distance = {:?}", self.evader_distance)?;
        writeln!(w, "p1_distance = {:?}", self.pursuer_distances[0])?;
        writeln!(w, "p2_distance = {:?}", self.pursuer_distances[1])?;
        writeln!(w, "nested_fallback = {}", self.nested_fallback)?;
        Ok(())
    }
}

/// A crossing of two Apollonius boundaries, located on the first one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCrossing {
    pub lambda: f64,
    pub point: SurfacePoint,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryIntersections {
    /// The two boundaries coincide everywhere.
    Coincident,
    Points(Vec<BoundaryCrossing>),
}

/// Where `∂A1` crosses `∂A2`, found by scanning the arrival-time margin of
/// the second pursuer along the first boundary and bisecting in `lambda`.
pub fn boundary_intersections(
    b1: &ApolloniusBoundary,
    b2: &ApolloniusBoundary,
) -> Result<BoundaryIntersections> {
    if b1.samples().len() < MIN_INTERSECTION_SAMPLES
        || b2.samples().len() < MIN_INTERSECTION_SAMPLES
    {
        return Err(Error::InvalidParams(format!(
            "intersection scans need at least {MIN_INTERSECTION_SAMPLES} boundary samples"
        )));
    }
    if arc_length(b1.evader(), b2.evader()) > 1e-12 * b1.params().radius {
        return Err(Error::InvalidParams(
            "boundaries belong to different evaders".into(),
        ));
    }
    let p2 = *b2.pursuer();
    let e = *b1.evader();
    let params2 = *b2.params();
    let margin = |pt: &SurfacePoint| {
        arc_length(pt, &p2) / params2.pursuer_speed
            - arc_length(pt, &e) / params2.evader_max_speed()
    };
    let samples = b1.samples();
    let values: Vec<f64> = samples.iter().map(|s| margin(&s.point)).collect();

    let time_tol = MEMBERSHIP_TOL * params2.radius / params2.evader_max_speed();
    if values.iter().all(|g| g.abs() <= time_tol) {
        return Ok(BoundaryIntersections::Coincident);
    }

    let mut crossings = Vec::new();
    // the last sample repeats the first
    for k in 0..samples.len() - 1 {
        let (g0, g1) = (values[k], values[k + 1]);
        if g0 == 0.0 {
            crossings.push(BoundaryCrossing {
                lambda: samples[k].lambda,
                point: samples[k].point,
            });
        } else if g0 * g1 < 0.0 {
            let f = |l: f64| {
                b1.sample_at(l)
                    .map(|s| margin(&s.point))
                    .unwrap_or(f64::NAN)
            };
            let lambda = bisect(f, samples[k].lambda, samples[k + 1].lambda).ok_or(
                Error::NoJointIntercept(format!(
                    "crossing refinement failed near lambda = {}",
                    samples[k].lambda
                )),
            )?;
            crossings.push(BoundaryCrossing {
                lambda,
                point: b1.sample_at(lambda)?.point,
            });
        }
    }
    Ok(BoundaryIntersections::Points(crossings))
}

fn result_for(point: SurfacePoint, case: InterceptCase, agents: &Agents) -> InterceptResult {
    let d1 = arc_length(&point, &agents.p1);
    let d2 = arc_length(&point, &agents.p2);
    let de = arc_length(&point, &agents.e);
    InterceptResult {
        point,
        time: de / agents.params1.evader_max_speed(),
        case,
        pursuer_times: [
            d1 / agents.params1.pursuer_speed,
            d2 / agents.params2.pursuer_speed,
        ],
        pursuer_distances: [d1, d2],
        evader_distance: de,
        nested_fallback: false,
    }
}

struct Agents {
    e: SurfacePoint,
    p1: SurfacePoint,
    p2: SurfacePoint,
    params1: GameParams,
    params2: GameParams,
}

/// Intercept point of the two-pursuer min-max capture time game.
///
/// Uses `P1`'s one-on-one intercept when it lies in `A2`, then `P2`'s when it
/// lies in `A1`, otherwise the boundary crossing farthest from `E`.
pub fn two_pursuer_intercept(cfg: &TwoPursuerConfig) -> Result<InterceptResult> {
    let (e, p1, p2) = cfg.positions();
    two_pursuer_intercept_at(
        &e,
        &p1,
        &p2,
        &cfg.pursuer_1,
        &cfg.pursuer_2,
        DEFAULT_SAMPLES,
    )
}

/// [`two_pursuer_intercept`] for agents at arbitrary positions.
pub fn two_pursuer_intercept_at(
    e: &SurfacePoint,
    p1: &SurfacePoint,
    p2: &SurfacePoint,
    params1: &GameParams,
    params2: &GameParams,
    n_samples: usize,
) -> Result<InterceptResult> {
    let cfg = TwoPursuerConfig::from_positions(e, p1, p2, *params1, *params2)?;
    for (i, (a, p)) in [(cfg.alpha_1, params1), (cfg.alpha_2, params2)]
        .into_iter()
        .enumerate()
    {
        if a >= critical_alpha(p) {
            return Err(Error::InvalidParams(format!(
                "alpha_{} = {a} must be below the critical angle {}",
                i + 1,
                critical_alpha(p)
            )));
        }
    }
    let agents = Agents {
        e: *e,
        p1: *p1,
        p2: *p2,
        params1: *params1,
        params2: *params2,
    };
    let i1 = intercept_point(p1, e, params1)?;
    if contains(&i1.point, p2, e, params2) {
        return Ok(result_for(i1.point, InterceptCase::P1Solo, &agents));
    }
    let i2 = intercept_point(p2, e, params2)?;
    if contains(&i2.point, p1, e, params1) {
        return Ok(result_for(i2.point, InterceptCase::P2Solo, &agents));
    }

    let b1 = ApolloniusBoundary::new(p1, e, params1, n_samples)?;
    let b2 = ApolloniusBoundary::new(p2, e, params2, n_samples)?;
    let crossings = match boundary_intersections(&b1, &b2)? {
        BoundaryIntersections::Coincident => {
            return Ok(result_for(i1.point, InterceptCase::P1Solo, &agents));
        }
        BoundaryIntersections::Points(points) => points,
    };
    if let Some(best) = crossings
        .iter()
        .max_by(|a, b| arc_length(e, &a.point).total_cmp(&arc_length(e, &b.point)))
    {
        return Ok(result_for(
            best.point,
            InterceptCase::JointBoundary,
            &agents,
        ));
    }

    let a1_inside_a2 = b1.samples().iter().all(|s| b2.contains(&s.point));
    let a2_inside_a1 = b2.samples().iter().all(|s| b1.contains(&s.point));
    let fallback = match (a1_inside_a2, a2_inside_a1) {
        (true, false) => Some(result_for(i1.point, InterceptCase::P1Solo, &agents)),
        (false, true) => Some(result_for(i2.point, InterceptCase::P2Solo, &agents)),
        _ => None,
    };
    fallback
        .map(|r| InterceptResult {
            nested_fallback: true,
            ..r
        })
        .ok_or_else(|| {
            Error::NoJointIntercept(format!(
                "boundaries neither cross nor nest (alpha_1 = {}, alpha_2 = {}, lambda_o = {})",
                cfg.alpha_1, cfg.alpha_2, cfg.lambda_o
            ))
        })
}

/// A spherical cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetRegion {
    pub center: SurfacePoint,
    pub angular_radius: f64,
}

impl TargetRegion {
    pub fn new(center: SurfacePoint, angular_radius: f64) -> Result<Self> {
        if !(angular_radius > 0.0 && angular_radius < PI) {
            return Err(Error::InvalidParams(format!(
                "cap radius {angular_radius} outside (0, pi)"
            )));
        }
        Ok(Self {
            center,
            angular_radius,
        })
    }

    pub fn contains(&self, point: &SurfacePoint) -> bool {
        let r = self.center.radius();
        arc_length(&self.center, point) <= (self.angular_radius + MEMBERSHIP_TOL) * r
    }
}

/// The evader can reach some target point before the pursuer.
pub fn evader_wins_guarding(b: &ApolloniusBoundary, target: &TargetRegion) -> bool {
    if target.contains(b.evader()) || b.contains(&target.center) {
        return true;
    }
    if b.samples().iter().any(|s| target.contains(&s.point)) {
        return true;
    }
    // a cap just touching the boundary between samples
    b.nearest(&target.center)
        .map(|s| target.contains(&s.point))
        .unwrap_or(false)
}

/// Largest separation for which the geodesic parallel strategy guards a
/// target the evader cannot reach: `pi (1 - mu) / (1 + mu)`.
pub fn guarding_alpha_threshold(params: &GameParams) -> f64 {
    PI * (1.0 - params.mu) / (1.0 + params.mu)
}

pub fn pursuer_wins_guarding(
    b: &ApolloniusBoundary,
    target: &TargetRegion,
    alpha: f64,
    params: &GameParams,
) -> bool {
    alpha <= guarding_alpha_threshold(params) && !evader_wins_guarding(b, target)
}

/// Pursuer heading toward the boundary point tied to the evader's heading
/// `lambda` (zero toward `P`, see [`crate::apollonius`]).
pub fn geodesic_parallel_heading(
    p: &SurfacePoint,
    e: &SurfacePoint,
    lambda: f64,
    params: &GameParams,
) -> Result<f64> {
    let cfg = relative_config(p, e);
    let target = boundary_point(p, e, lambda, params)?;
    let dir = direction_toward(p, &target)?;
    cfg.heading_of(Agent::Pursuer, &dir)
}

/// Boundary heading `lambda` of an evader moving with frame heading `u_E`.
pub fn lambda_of_evader_heading(evader_heading: f64) -> f64 {
    wrap_angle(PI - evader_heading)
}

/// Pursuer playing the geodesic parallel strategy against the evader's
/// current heading; pure pursuit while the evader stands still.
#[derive(Debug, Clone, Copy, Default)]
pub struct GeodesicParallelPursuer;

impl PursuerPolicy for GeodesicParallelPursuer {
    fn heading(&mut self, state: &GameState, evader: &EvaderControl) -> Result<f64> {
        if evader.speed <= 0.0 {
            return Ok(0.0);
        }
        geodesic_parallel_heading(
            &state.pursuer,
            &state.evader,
            lambda_of_evader_heading(evader.heading),
            &state.params,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolylineSegment {
    /// Boundary heading `lambda` taken at the start of the segment.
    pub heading: f64,
    pub duration: f64,
}

/// Evader running a polygonal line of geodesic arcs at full speed. Each
/// segment's great circle is fixed when the segment starts; the last segment
/// continues indefinitely.
#[derive(Debug, Clone)]
pub struct PolylineEvader {
    segments: Vec<PolylineSegment>,
    active: Option<(usize, Vec3)>,
}

impl PolylineEvader {
    pub fn new(segments: Vec<PolylineSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParams(
                "polyline needs at least one segment".into(),
            ));
        }
        Ok(Self {
            segments,
            active: None,
        })
    }

    /// `n_segments` random headings over durations summing to `horizon`.
    pub fn random<R: Rng>(rng: &mut R, n_segments: usize, horizon: f64) -> Result<Self> {
        let weights: Vec<f64> = (0..n_segments).map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let segments = weights
            .iter()
            .map(|w| PolylineSegment {
                heading: rng.gen_range(-PI..PI),
                duration: horizon * w / total,
            })
            .collect();
        Self::new(segments)
    }

    pub fn segments(&self) -> &[PolylineSegment] {
        &self.segments
    }

    fn segment_index(&self, t: f64) -> usize {
        let mut end = 0.0;
        for (k, s) in self.segments.iter().enumerate() {
            end += s.duration;
            if t < end {
                return k;
            }
        }
        self.segments.len() - 1
    }
}

impl EvaderPolicy for PolylineEvader {
    fn control(&mut self, state: &GameState) -> Result<EvaderControl> {
        let k = self.segment_index(state.t);
        let frame = state.config.frame()?;
        let eu = state.evader.unit();
        let axis = match self.active {
            Some((active, axis)) if active == k => axis,
            _ => {
                let d = heading_direction(frame, self.segments[k].heading);
                let axis = eu.cross(&d).normalize();
                self.active = Some((k, axis));
                axis
            }
        };
        let dir = axis.cross(&eu).normalize();
        Ok(EvaderControl {
            speed: state.params.evader_max_speed(),
            heading: state.config.heading_of(Agent::Evader, &dir)?,
        })
    }
}
