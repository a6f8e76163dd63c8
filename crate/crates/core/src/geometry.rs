//! Great-circle geometry on a round sphere of radius `R`.
//!
//! Points are stored as Cartesian vectors whose norm is the sphere radius.
//! All motion is performed by exact axis-angle rotation, followed by a
//! renormalisation to `R`, so the norm invariant survives long playouts.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// `sin(alpha)` below this marks a collinear (capture or antipodal) pair.
pub const DEGENERACY_SIN: f64 = 1e-9;

/// Allowed `|dir . X_hat|` for a direction to count as tangent at `X`.
pub const TANGENCY_TOL: f64 = 1e-10;

/// Global constants of one engagement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameParams {
    /// Sphere radius.
    pub radius: f64,
    /// Pursuer speed (constant).
    pub pursuer_speed: f64,
    /// Evader max speed over pursuer speed, strictly inside `(0, 1)`.
    pub mu: f64,
}

impl GameParams {
    pub fn new(radius: f64, pursuer_speed: f64, mu: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParams(format!(
                "radius must be > 0, got {radius}"
            )));
        }
        if !(pursuer_speed.is_finite() && pursuer_speed > 0.0) {
            return Err(Error::InvalidParams(format!(
                "pursuer speed must be > 0, got {pursuer_speed}"
            )));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidParams(format!(
                "speed ratio must lie in (0, 1), got {mu}"
            )));
        }
        Ok(Self {
            radius,
            pursuer_speed,
            mu,
        })
    }

    /// Unit sphere, unit pursuer speed.
    pub fn unit(mu: f64) -> Result<Self> {
        Self::new(1.0, 1.0, mu)
    }

    pub fn evader_max_speed(&self) -> f64 {
        self.mu * self.pursuer_speed
    }
}

/// A position on the sphere surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint(Vec3);

impl SurfacePoint {
    /// Latitude `phi`, longitude `theta`, sphere radius `radius`.
    pub fn from_spherical(phi: f64, theta: f64, radius: f64) -> Self {
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        Self(Vec3::new(radius * cp * ct, radius * cp * st, radius * sp))
    }

    /// Projects an arbitrary non-zero vector radially onto the sphere.
    pub fn from_vector(v: Vec3, radius: f64) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Geometry(
                "cannot project a zero vector onto the sphere".into(),
            ));
        }
        Ok(Self(v * (radius / n)))
    }

    pub fn north_pole(radius: f64) -> Self {
        Self(Vec3::new(0.0, 0.0, radius))
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }
    pub fn y(&self) -> f64 {
        self.0.y
    }
    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn vector(&self) -> &Vec3 {
        &self.0
    }

    pub fn radius(&self) -> f64 {
        self.0.norm()
    }

    pub fn unit(&self) -> Vec3 {
        self.0.normalize()
    }

    pub fn antipode(&self) -> Self {
        Self(-self.0)
    }

    /// Latitude and longitude `(phi, theta)`, `theta` in `(-pi, pi]`.
    pub fn to_spherical(&self) -> (f64, f64) {
        let r = self.radius();
        (
            (self.0.z / r).clamp(-1.0, 1.0).asin(),
            self.0.y.atan2(self.0.x),
        )
    }
}

/// Central angle between two vectors, well conditioned over the whole of `[0, pi]`.
pub fn central_angle(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Geodesic (great-circle) distance between two surface points.
pub fn arc_length(a: &SurfacePoint, b: &SurfacePoint) -> f64 {
    0.5 * (a.radius() + b.radius()) * central_angle(&a.0, &b.0)
}

/// The great circle through `P` and `E` with heading references at both agents.
///
/// `tangent_pursuer` points from `P` toward `E`; `tangent_evader` points from
/// `E` away from `P`. Both are `normal x X_hat`, so a heading of zero moves
/// each agent in the sense of increasing angle from `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreatCircleFrame {
    pub normal: Vec3,
    pub tangent_pursuer: Vec3,
    pub tangent_evader: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agent {
    Pursuer,
    Evader,
}

/// Angular separation of the two agents plus the frame it is measured in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeConfig {
    pub alpha: f64,
    pub frame: Option<GreatCircleFrame>,
}

impl RelativeConfig {
    pub fn is_degenerate(&self) -> bool {
        self.frame.is_none()
    }

    /// Degenerate with the agents on opposite sides of the sphere.
    pub fn is_antipodal(&self) -> bool {
        self.is_degenerate() && self.alpha > 0.5 * PI
    }

    pub fn frame(&self) -> Result<&GreatCircleFrame> {
        self.frame
            .as_ref()
            .ok_or(Error::Degenerate { alpha: self.alpha })
    }

    /// Velocity `speed (cos u t_X + sin u n_GC)` of `agent` under heading `u`.
    pub fn velocity(&self, agent: Agent, heading: f64, speed: f64) -> Result<Vec3> {
        let frame = self.frame()?;
        let tangent = match agent {
            Agent::Pursuer => frame.tangent_pursuer,
            Agent::Evader => frame.tangent_evader,
        };
        let (s, c) = heading.sin_cos();
        Ok(speed * (c * tangent + s * frame.normal))
    }

    /// Heading of a tangent direction at `agent`, inverse of [`Self::velocity`].
    pub fn heading_of(&self, agent: Agent, dir: &Vec3) -> Result<f64> {
        let frame = self.frame()?;
        let tangent = match agent {
            Agent::Pursuer => frame.tangent_pursuer,
            Agent::Evader => frame.tangent_evader,
        };
        Ok(dir.dot(&frame.normal).atan2(dir.dot(&tangent)))
    }
}

pub fn relative_config(p: &SurfacePoint, e: &SurfacePoint) -> RelativeConfig {
    let pu = p.unit();
    let eu = e.unit();
    let cross = pu.cross(&eu);
    let sin_alpha = cross.norm();
    let alpha = sin_alpha.atan2(pu.dot(&eu));
    if sin_alpha < DEGENERACY_SIN {
        return RelativeConfig {
            alpha: if alpha < 0.5 * PI { 0.0 } else { PI },
            frame: None,
        };
    }
    let normal = cross / sin_alpha;
    RelativeConfig {
        alpha,
        frame: Some(GreatCircleFrame {
            normal,
            tangent_pursuer: normal.cross(&pu),
            tangent_evader: normal.cross(&eu),
        }),
    }
}

/// Result of a geodesic step: the new point and the parallel-transported direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicStep {
    pub point: SurfacePoint,
    pub direction: Vec3,
}

/// Moves `x` by arc length `arc` along the great circle leaving it in unit
/// direction `dir`, returning the transported direction as well.
pub fn step_geodesic_transport(x: &SurfacePoint, dir: &Vec3, arc: f64) -> Result<GeodesicStep> {
    let radius = x.radius();
    let xu = x.0 / radius;
    let dir_norm = dir.norm();
    if (dir_norm - 1.0).abs() > TANGENCY_TOL || xu.dot(dir).abs() > TANGENCY_TOL {
        return Err(Error::NotTangent {
            dot: xu.dot(dir),
            norm: dir_norm,
        });
    }
    if !(arc >= 0.0 && arc.is_finite()) {
        return Err(Error::Geometry(format!(
            "arc length must be finite and >= 0, got {arc}"
        )));
    }
    let (s, c) = (arc / radius).sin_cos();
    let moved = c * xu + s * dir;
    let transported = c * dir - s * xu;
    Ok(GeodesicStep {
        point: SurfacePoint(moved * (radius / moved.norm())),
        direction: transported.normalize(),
    })
}

pub fn step_geodesic(x: &SurfacePoint, dir: &Vec3, arc: f64) -> Result<SurfacePoint> {
    step_geodesic_transport(x, dir, arc).map(|s| s.point)
}

/// Unit tangent at `x` pointing along the geodesic toward `target`.
///
/// Fails when `target` coincides with `x` or its antipode.
pub fn direction_toward(x: &SurfacePoint, target: &SurfacePoint) -> Result<Vec3> {
    let xu = x.unit();
    let t = target.unit();
    let d = t - t.dot(&xu) * xu;
    let n = d.norm();
    if n < DEGENERACY_SIN {
        return Err(Error::Geometry(
            "direction toward a coincident or antipodal point is undefined".into(),
        ));
    }
    Ok(d / n)
}

/// Tangent basis used when the agents are antipodal and no great circle is
/// singled out: `t` is world `+x` projected onto the tangent plane (`+y` if
/// `x` sits on the x-axis), `n = X_hat x t`.
pub fn dispersal_basis(x: &SurfacePoint) -> (Vec3, Vec3) {
    let xu = x.unit();
    let mut reference = Vec3::x();
    if xu.cross(&reference).norm() < 1e-6 {
        reference = Vec3::y();
    }
    let t = (reference - reference.dot(&xu) * xu).normalize();
    (t, xu.cross(&t))
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn spherical_construction() {
        let np = SurfacePoint::from_spherical(FRAC_PI_2, 0.0, 1.0);
        assert_abs_diff_eq!(np.vector(), &Vec3::new(0.0, 0.0, 1.0), epsilon = 1e-15);
        let eq = SurfacePoint::from_spherical(0.0, 0.0, 2.0);
        assert_abs_diff_eq!(eq.vector(), &Vec3::new(2.0, 0.0, 0.0), epsilon = 1e-15);

        // direct evaluation of the latitude/longitude formulas
        let (phi, theta) = (0.3_f64, 1.1_f64);
        let p = SurfacePoint::from_spherical(phi, theta, 1.0);
        assert_abs_diff_eq!(p.x(), phi.cos() * theta.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.y(), phi.cos() * theta.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.z(), phi.sin(), epsilon = 1e-15);
        let (phi2, theta2) = p.to_spherical();
        assert_abs_diff_eq!(phi2, phi, epsilon = 1e-14);
        assert_abs_diff_eq!(theta2, theta, epsilon = 1e-14);
    }

    #[test]
    fn params_validation() {
        assert!(GameParams::new(1.0, 1.0, 0.5).is_ok());
        assert!(GameParams::new(1.0, 1.0, 1.0).is_err());
        assert!(GameParams::new(1.0, 1.0, 0.0).is_err());
        assert!(GameParams::new(0.0, 1.0, 0.5).is_err());
        assert!(GameParams::new(1.0, -1.0, 0.5).is_err());
    }

    #[test]
    fn degenerate_configs() {
        let p = SurfacePoint::from_spherical(0.2, 0.4, 3.0);
        let same = relative_config(&p, &p);
        assert_eq!(same.alpha, 0.0);
        assert!(same.is_degenerate() && !same.is_antipodal());
        let anti = relative_config(&p, &p.antipode());
        assert_eq!(anti.alpha, PI);
        assert!(anti.is_antipodal());
        assert!(anti.velocity(Agent::Pursuer, 0.0, 1.0).is_err());
    }

    #[test]
    fn orthogonal_pair_frame() {
        let p = SurfacePoint::north_pole(1.0);
        let e = SurfacePoint::from_spherical(0.0, 0.7, 1.0);
        let cfg = relative_config(&p, &e);
        assert_abs_diff_eq!(cfg.alpha, FRAC_PI_2, epsilon = 1e-15);
        let f = cfg.frame.unwrap();
        for v in [f.normal, f.tangent_pursuer, f.tangent_evader] {
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(f.normal.dot(&f.tangent_pursuer), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.normal.dot(&f.tangent_evader), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.tangent_pursuer.dot(&p.unit()), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.tangent_evader.dot(&e.unit()), 0.0, epsilon = 1e-12);
        // t_P leads toward E, t_E leads away from P
        assert!(f.tangent_pursuer.dot(&e.unit()) > 0.99);
        assert!(f.tangent_evader.dot(&p.unit()) < -0.99);
    }

    #[test]
    fn geodesic_steps() {
        let np = SurfacePoint::north_pole(2.0);
        assert_eq!(step_geodesic(&np, &Vec3::x(), 0.0).unwrap(), np);
        let q = step_geodesic(&np, &Vec3::x(), 2.0 * FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(q.vector(), &Vec3::new(2.0, 0.0, 0.0), epsilon = 1e-14);

        let x = SurfacePoint::from_spherical(0.3, -2.0, 1.5);
        let dir = x.unit().cross(&Vec3::new(0.2, 0.9, -0.1)).normalize();
        let full = step_geodesic(&x, &dir, 2.0 * PI * 1.5).unwrap();
        assert_abs_diff_eq!(full.vector(), x.vector(), epsilon = 1e-9);

        assert!(matches!(
            step_geodesic(&np, &Vec3::z(), 0.1),
            Err(Error::NotTangent { .. })
        ));
        assert!(step_geodesic(&np, &Vec3::x(), -0.1).is_err());
    }

    #[test]
    fn headings() {
        let p = SurfacePoint::from_spherical(0.1, 0.2, 1.0);
        let e = SurfacePoint::from_spherical(-0.4, 1.3, 1.0);
        let cfg = relative_config(&p, &e);
        let f = cfg.frame.unwrap();
        let v0 = cfg.velocity(Agent::Pursuer, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(v0, 2.0 * f.tangent_pursuer, epsilon = 1e-15);
        let v1 = cfg.velocity(Agent::Evader, FRAC_PI_2, 1.0).unwrap();
        assert_abs_diff_eq!(v1, f.normal, epsilon = 1e-15);
        let v2 = cfg.velocity(Agent::Pursuer, PI, 1.0).unwrap();
        assert_abs_diff_eq!(v2, -f.tangent_pursuer, epsilon = 1e-15);
        let h = cfg
            .heading_of(
                Agent::Evader,
                &cfg.velocity(Agent::Evader, 2.2, 1.0).unwrap(),
            )
            .unwrap();
        assert_abs_diff_eq!(h, 2.2, epsilon = 1e-14);
    }

    #[test]
    fn dispersal_basis_is_tangent() {
        for x in [
            SurfacePoint::north_pole(1.0),
            SurfacePoint::from_spherical(0.0, 0.0, 1.0),
        ] {
            let (t, n) = dispersal_basis(&x);
            assert_abs_diff_eq!(t.dot(&x.unit()), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(n.dot(&x.unit()), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(t.dot(&n), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn wrapping() {
        assert_abs_diff_eq!(wrap_angle(3.0 * PI), -PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(-PI), -PI, epsilon = 0.0);
        assert_abs_diff_eq!(wrap_angle(0.5), 0.5, epsilon = 0.0);
        assert!(wrap_angle(PI) < PI);
    }
}
