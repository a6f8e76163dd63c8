//! Min-max capture-time pursuit-evasion on a sphere.
//!
//! A faster pursuer `P` and a slower evader `E` move with simple motion on a
//! sphere of radius `R`. The crate provides the great-circle geometry, the
//! equilibrium strategies and value of the game, the evader's Apollonius
//! domain with its intercept-point classification, two-pursuer and
//! target-guarding constructions, a time-stepped simulator, and the scenario
//! format used by the `sphere-pe` command-line tool.

pub mod apollonius;
pub mod engagements;
pub mod error;
pub mod geometry;
pub mod kinematics;
mod roots;
pub mod scenario;
pub mod sim;
pub mod strategies;

pub use error::{Error, Result};
pub use geometry::{GameParams, RelativeConfig, SurfacePoint, Vec3};
pub use roots::{bisect, golden_min};
