//! Camera geometry built around the principal line of a planar view: the
//! image of the pattern plane's symmetry axis, which always passes
//! through the camera's principal point.
//!
//! The line is computed by two independent closed-form routes: straight
//! from the plane-to-image homography, and from two pairs of orthogonal
//! vanishing points, plus a limit form for vanishing points at infinity.
//! The [`equiv`] module verifies numerically and in exact rational
//! arithmetic that the routes coincide, and [`calibration`] estimates the
//! principal point as the least-squares intersection of principal lines
//! collected across views.
//!
//! # Modules
//!
//! - [`geometry`]: homogeneous points, projective lines, homographies.
//! - [`vanishing`]: orthogonal vanishing-point pairs by both routes.
//! - [`principal_line`]: the three closed forms and automatic dispatch.
//! - [`calibration`]: homography estimation, outlier rejection, and the
//!   principal-point solve.
//! - [`synth`]: ground-truth cameras, pattern projection, scenarios.
//! - [`equiv`]: the route-equivalence verifier.

pub mod calibration;
pub mod equiv;
pub mod error;
pub mod geometry;
pub mod principal_line;
pub mod synth;
pub mod vanishing;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use calibration::{
    calibrate, estimate_homography, estimate_principal_point, flag_outliers, CalibrateOptions,
    CalibrationInput, CalibrationReport, CorrespondenceSet, PpEstimate,
};
pub use equiv::{
    check_guards, check_infinite, check_once, fuzz, EquivalenceReport, GuardThresholds, Mode,
};
pub use error::{Error, GuardClass, Result};
pub use geometry::{Homography, HomogeneousPoint2, PointClass, ProjectiveLine};
pub use principal_line::{
    pl_auto, pl_from_homography, pl_from_ovps, pl_from_ovps_infinite_pv1,
    pl_from_ovps_infinite_second_pair, PlMethod, PrincipalLine, SourceCondition,
};
pub use synth::{project_pattern, random_pose, GridSpec, PinholeCamera, Scenario, ScenarioSpec};
pub use vanishing::{DirectionPair, OvpQuad, PatternSquare};
