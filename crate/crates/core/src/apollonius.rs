//! The Apollonius domain on the sphere: the closed set of points the evader
//! reaches no later than the pursuer, both moving at full speed.
//!
//! The boundary is parameterised by the evader's heading `lambda`, measured
//! at `E` from the geodesic toward `P` and positive toward `+n_GC`. Along that
//! heading the boundary lies at arc length `delta(lambda)` from `E`, the unique
//! root of
//!
//! ```text
//! cos(delta / (R mu)) = cos(delta / R) cos(alpha) + sin(alpha) cos(lambda) sin(delta / R)
//! ```
//!
//! `lambda = 0` charges the pursuer, `lambda = +-pi` flees straight away from it.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::{
    arc_length, central_angle, relative_config, step_geodesic, GameParams, GreatCircleFrame,
    SurfacePoint, Vec3,
};
use crate::roots::{bisect, golden_min};
use crate::strategies::value;

/// Default boundary resolution: half a degree in `lambda` over a full turn.
pub const DEFAULT_SAMPLES: usize = 721;

/// Lower end of the root bracket, in units of `R`.
const BRACKET_LO: f64 = 1e-9;
/// Slack added above the closed-form upper bound, in units of `R`.
const BRACKET_SLACK: f64 = 1e-6;
/// Closed-set slack for membership tests, in units of `R`.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// `pi (1 - mu)`: the largest separation for which the equilibrium intercept
/// point still lies on the domain boundary.
pub fn critical_alpha(params: &GameParams) -> f64 {
    PI * (1.0 - params.mu)
}

/// Closed forms `(delta(0), delta(pi))` bounding `delta` on `[0, pi]`.
pub fn delta_bounds(alpha: f64, params: &GameParams) -> (f64, f64) {
    let (r, mu) = (params.radius, params.mu);
    let lower = alpha * r * mu / (1.0 + mu);
    let upper = if alpha <= critical_alpha(params) {
        alpha * r * mu / (1.0 - mu)
    } else {
        // E flees past P's antipode and P closes the short way around
        r * mu * (2.0 * PI - alpha) / (1.0 + mu)
    };
    (lower, upper)
}

/// Residual of the implicit boundary relation at `delta`.
pub fn boundary_residual(delta: f64, lambda: f64, alpha: f64, params: &GameParams) -> f64 {
    let x = delta / params.radius;
    (x / params.mu).cos() - (x.cos() * alpha.cos() + alpha.sin() * lambda.cos() * x.sin())
}

/// Pursuer's central angle to the point at arc `x R` from `E` along heading
/// `lambda`, evaluated in a local frame where it is well conditioned.
fn pursuer_angle(x: f64, lambda: f64, alpha: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let (sx, cx) = x.sin_cos();
    let (sl, cl) = lambda.sin_cos();
    let p = Vec3::new(sa, 0.0, ca);
    let i = Vec3::new(sx * cl, sx * sl, cx);
    central_angle(&p, &i)
}

/// Arc length from `E` to the boundary along heading `lambda`.
pub fn delta_of_lambda(lambda: f64, alpha: f64, params: &GameParams) -> Result<f64> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Error::Degenerate { alpha });
    }
    let mu = params.mu;
    let (_, upper) = delta_bounds(alpha, params);
    let lo = BRACKET_LO;
    let hi = upper / params.radius + BRACKET_SLACK;
    // strictly decreasing in x: geodesic distance is 1-Lipschitz and 1/mu > 1
    let gap = |x: f64| pursuer_angle(x, lambda, alpha) - x / mu;
    if !(gap(lo) > 0.0 && gap(hi) < 0.0) {
        return Err(Error::Bracket {
            alpha,
            lambda,
            lo: lo * params.radius,
            hi: hi * params.radius,
        });
    }
    bisect(gap, lo, hi)
        .map(|x| x * params.radius)
        .ok_or(Error::Bracket {
            alpha,
            lambda,
            lo: lo * params.radius,
            hi: hi * params.radius,
        })
}

/// Unit tangent at `E` for boundary heading `lambda` (zero toward `P`).
pub fn heading_direction(frame: &GreatCircleFrame, lambda: f64) -> Vec3 {
    let (s, c) = lambda.sin_cos();
    -c * frame.tangent_evader + s * frame.normal
}

/// Boundary point along heading `lambda` for the pair `(P, E)`.
pub fn boundary_point(
    p: &SurfacePoint,
    e: &SurfacePoint,
    lambda: f64,
    params: &GameParams,
) -> Result<SurfacePoint> {
    let cfg = relative_config(p, e);
    let delta = delta_of_lambda(lambda, cfg.alpha, params)?;
    step_geodesic(e, &heading_direction(cfg.frame()?, lambda), delta)
}

/// `E` reaches `point` no later than `P` (boundary included).
pub fn contains(
    point: &SurfacePoint,
    p: &SurfacePoint,
    e: &SurfacePoint,
    params: &GameParams,
) -> bool {
    arc_length(point, e) - params.mu * arc_length(point, p) <= MEMBERSHIP_TOL * params.radius
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub lambda: f64,
    pub delta: f64,
    pub point: SurfacePoint,
    /// Common arrival time of both agents at `point`.
    pub time: f64,
}

/// Sampled boundary of the Apollonius domain for one pursuer/evader pair.
#[derive(Debug, Clone)]
pub struct ApolloniusBoundary {
    pursuer: SurfacePoint,
    evader: SurfacePoint,
    params: GameParams,
    alpha: f64,
    frame: GreatCircleFrame,
    samples: Vec<BoundarySample>,
    monotone: bool,
}

impl ApolloniusBoundary {
    /// Samples `lambda` uniformly on `[0, pi]` and mirrors onto `[-pi, 0)`.
    ///
    /// The result runs from `lambda = -pi` to `lambda = pi` inclusive, so the
    /// first and last samples coincide; `n_samples` is rounded up to odd.
    pub fn new(
        p: &SurfacePoint,
        e: &SurfacePoint,
        params: &GameParams,
        n_samples: usize,
    ) -> Result<Self> {
        if n_samples < 8 {
            return Err(Error::InvalidParams(format!(
                "need at least 8 boundary samples, got {n_samples}"
            )));
        }
        let cfg = relative_config(p, e);
        let frame = *cfg.frame()?;
        let mut b = Self {
            pursuer: *p,
            evader: *e,
            params: *params,
            alpha: cfg.alpha,
            frame,
            samples: Vec::new(),
            monotone: true,
        };
        let half = n_samples / 2;
        let half_samples = (0..=half)
            .map(|j| b.sample_at(PI * j as f64 / half as f64))
            .collect::<Result<Vec<_>>>()?;
        b.monotone = half_samples.windows(2).all(|w| w[1].delta > w[0].delta);
        let mut samples = Vec::with_capacity(2 * half + 1);
        for s in half_samples[1..].iter().rev() {
            samples.push(BoundarySample {
                lambda: -s.lambda,
                delta: s.delta,
                point: step_geodesic(&b.evader, &b.evader_direction(-s.lambda), s.delta)?,
                time: s.time,
            });
        }
        samples.extend(half_samples);
        b.samples = samples;
        Ok(b)
    }

    pub fn pursuer(&self) -> &SurfacePoint {
        &self.pursuer
    }
    pub fn evader(&self) -> &SurfacePoint {
        &self.evader
    }
    pub fn params(&self) -> &GameParams {
        &self.params
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn frame(&self) -> &GreatCircleFrame {
        &self.frame
    }
    pub fn samples(&self) -> &[BoundarySample] {
        &self.samples
    }

    /// Whether sampled `delta` strictly increased over `lambda` in `[0, pi]`.
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// Unit tangent at `E` for heading `lambda`.
    pub fn evader_direction(&self, lambda: f64) -> Vec3 {
        heading_direction(&self.frame, lambda)
    }

    /// Boundary point for an arbitrary heading.
    pub fn sample_at(&self, lambda: f64) -> Result<BoundarySample> {
        let delta = delta_of_lambda(lambda, self.alpha, &self.params)?;
        Ok(BoundarySample {
            lambda,
            delta,
            point: step_geodesic(&self.evader, &self.evader_direction(lambda), delta)?,
            time: delta / self.params.evader_max_speed(),
        })
    }

    pub fn contains(&self, point: &SurfacePoint) -> bool {
        contains(point, &self.pursuer, &self.evader, &self.params)
    }

    /// Smallest geodesic distance from `point` to a boundary sample.
    pub fn distance_to(&self, point: &SurfacePoint) -> f64 {
        self.samples
            .iter()
            .map(|s| arc_length(point, &s.point))
            .fold(f64::INFINITY, f64::min)
    }

    /// Closest boundary point to `point`, refined in `lambda` between the
    /// neighbours of the nearest sample.
    pub fn nearest(&self, point: &SurfacePoint) -> Result<BoundarySample> {
        let (k, _) = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, s)| (k, arc_length(point, &s.point)))
            .fold(
                (0, f64::INFINITY),
                |acc, x| if x.1 < acc.1 { x } else { acc },
            );
        let step = 2.0 * PI / (self.samples.len() - 1) as f64;
        let center = self.samples[k].lambda;
        let dist = |l: f64| {
            self.sample_at(l)
                .map(|s| arc_length(point, &s.point))
                .unwrap_or(f64::INFINITY)
        };
        let (lambda, _) = golden_min(dist, center - step, center + step, 1e-12);
        self.sample_at(lambda)
    }

    /// Writes `lambda_rad,delta,x,y,z,arrival_time`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "lambda_rad,delta,x,y,z,arrival_time")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:?},{:?},{:?},{:?},{:?},{:?}",
                s.lambda,
                s.delta,
                s.point.x(),
                s.point.y(),
                s.point.z(),
                s.time
            )?;
        }
        Ok(())
    }
}

/// Equilibrium intercept of a one-on-one game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intercept {
    pub point: SurfacePoint,
    pub time: f64,
    /// Arc travelled by the evader.
    pub evader_arc: f64,
}

/// Where both agents meet when each plays its equilibrium strategy from a
/// non-degenerate start: `R mu alpha / (1 - mu)` beyond `E` on the `P`-`E`
/// great circle.
pub fn intercept_point(
    p: &SurfacePoint,
    e: &SurfacePoint,
    params: &GameParams,
) -> Result<Intercept> {
    let cfg = relative_config(p, e);
    let frame = cfg.frame()?;
    let time = value(cfg.alpha, params)?;
    let evader_arc = params.evader_max_speed() * time;
    Ok(Intercept {
        point: step_geodesic(e, &frame.tangent_evader, evader_arc)?,
        time,
        evader_arc,
    })
}

/// Position of a separation relative to [`critical_alpha`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BelowCritical,
    Critical,
    AboveCritical,
}

impl Regime {
    pub fn classify(alpha: f64, params: &GameParams) -> Self {
        let ac = critical_alpha(params);
        if (alpha - ac).abs() <= 1e-12 * ac.max(1.0) {
            Regime::Critical
        } else if alpha < ac {
            Regime::BelowCritical
        } else {
            Regime::AboveCritical
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::BelowCritical => "below_critical",
            Regime::Critical => "critical",
            Regime::AboveCritical => "above_critical",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params() -> GameParams {
        GameParams::unit(0.5).unwrap()
    }

    fn pair(alpha: f64, radius: f64) -> (SurfacePoint, SurfacePoint) {
        (
            SurfacePoint::from_spherical(0.0, 0.0, radius),
            SurfacePoint::from_spherical(0.0, alpha, radius),
        )
    }

    #[test]
    fn critical_angles() {
        assert_abs_diff_eq!(critical_alpha(&params()), PI / 2.0, epsilon = 1e-15);
        let slow = GameParams::unit(0.35).unwrap();
        assert_abs_diff_eq!(critical_alpha(&slow), 0.65 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(critical_alpha(&slow), 2.0420, epsilon = 1e-4);
        let slow = GameParams::unit(1e-12).unwrap();
        assert_abs_diff_eq!(critical_alpha(&slow), PI, epsilon = 1e-10);
    }

    #[test]
    fn endpoint_roots() {
        let p = params();
        assert_abs_diff_eq!(
            delta_of_lambda(0.0, 1.0, &p).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(delta_of_lambda(PI, 1.0, &p).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn quarter_heading_root() {
        // with cos(lambda) = 0 the relation is cos(2 d) = cos(1) cos(d)
        let oracle = bisect(|d: f64| (2.0 * d).cos() - 1f64.cos() * d.cos(), 0.1, 1.0).unwrap();
        assert_abs_diff_eq!(oracle, 0.5453, epsilon = 1e-4);
        let d = delta_of_lambda(PI / 2.0, 1.0, &params()).unwrap();
        assert_abs_diff_eq!(d, oracle, epsilon = 1e-12);
        assert!(boundary_residual(d, PI / 2.0, 1.0, &params()).abs() <= 1e-12);
    }

    #[test]
    fn degenerate_alpha_rejected() {
        assert!(matches!(
            delta_of_lambda(0.3, 0.0, &params()),
            Err(Error::Degenerate { .. })
        ));
        assert!(matches!(
            delta_of_lambda(0.3, PI, &params()),
            Err(Error::Degenerate { .. })
        ));
        assert!(matches!(
            delta_of_lambda(0.3, 1e-12, &params()),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn boundary_layout() {
        let (p, e) = pair(1.0, 2.0);
        let params = GameParams::new(2.0, 1.5, 0.5).unwrap();
        let b = ApolloniusBoundary::new(&p, &e, &params, DEFAULT_SAMPLES).unwrap();
        assert_eq!(b.samples().len(), 721);
        assert_abs_diff_eq!(b.samples()[0].lambda, -PI, epsilon = 0.0);
        assert_abs_diff_eq!(b.samples()[720].lambda, PI, epsilon = 0.0);
        assert_abs_diff_eq!(b.samples()[360].lambda, 0.0, epsilon = 0.0);
        assert!(b.is_monotone());
        assert!(b.contains(&e));
        assert!(!b.contains(&p));
        for s in b.samples() {
            let te = arc_length(&e, &s.point) / params.evader_max_speed();
            let tp = arc_length(&p, &s.point) / params.pursuer_speed;
            assert!((te - tp).abs() <= 1e-7, "lambda {}: {te} vs {tp}", s.lambda);
        }
        assert!(ApolloniusBoundary::new(&p, &e, &params, 7).is_err());
        assert!(ApolloniusBoundary::new(&p, &p.antipode(), &params, 64).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let (p, e) = pair(1.0, 1.0);
        let b = ApolloniusBoundary::new(&p, &e, &params(), 9).unwrap();
        let mut buf = Vec::new();
        b.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "lambda_rad,delta,x,y,z,arrival_time");
        assert_eq!(lines.count(), b.samples().len());
    }

    #[test]
    fn intercept_on_unit_sphere() {
        let (p, e) = pair(1.0, 1.0);
        let i = intercept_point(&p, &e, &params()).unwrap();
        assert_abs_diff_eq!(arc_length(&e, &i.point), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(i.time, 2.0, epsilon = 1e-15);
        assert!(intercept_point(&p, &p.antipode(), &params()).is_err());
    }

    #[test]
    fn regimes() {
        let p = params();
        assert_eq!(Regime::classify(1.0, &p), Regime::BelowCritical);
        assert_eq!(Regime::classify(PI / 2.0, &p), Regime::Critical);
        assert_eq!(Regime::classify(1.6, &p), Regime::AboveCritical);
    }
}
