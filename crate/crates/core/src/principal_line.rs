//! The principal line of a planar view: the image of the pattern plane's
//! symmetry axis, which always passes through the camera's principal
//! point.
//!
//! Three closed forms are provided. The homography form reads the line
//! straight off the map's entries. The vanishing-point form rebuilds the
//! same line from two pairs of orthogonal vanishing points, and a limit
//! form covers the case where one of the first pair escapes to infinity.
//! [`pl_auto`] dispatches between them.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{Homography, HomogeneousPoint2, PointClass, ProjectiveLine, CLASSIFY_EPS};
use crate::vanishing::{DirectionPair, OvpQuad};

/// Fronto-parallel guard: the line is undefined when `hypot(h7, h8)` of
/// the canonical homography falls at or below this.
pub const FRONTO_TOL: f64 = 1e-9;

/// Relative floor for the denominators of the vanishing-point form,
/// measured against the largest participating coordinate. The algebra
/// ties a vanishing denominator to a vanishing direction coefficient, so
/// rather than chase a 0/0 limit the form reports the input degenerate.
pub const DENOM_REL_TOL: f64 = 1e-8;

/// Absolute floor for the line direction coefficients on canonically
/// scaled inputs.
const DIRECTION_TOL: f64 = 1e-12;

/// Which closed form produced a principal line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlMethod {
    Homography,
    Ovp,
    OvpInfinite,
}

/// Diagnostics captured alongside a principal line: the third-row
/// entries that gate the vanishing points and, when known, the
/// determinant of the source homography.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceCondition {
    pub h7: f64,
    pub h8: f64,
    pub det: Option<f64>,
}

/// A normalized projective line tagged with the route that computed it.
/// Never the line at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalLine {
    pub line: ProjectiveLine,
    pub method: PlMethod,
    pub source: SourceCondition,
}

impl Serialize for PrincipalLine {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PrincipalLine", 4)?;
        s.serialize_field("a", &self.line.a)?;
        s.serialize_field("b", &self.line.b)?;
        s.serialize_field("c", &self.line.c)?;
        s.serialize_field("method", &self.method)?;
        s.end()
    }
}

/// Principal line straight from the homography entries:
///
/// ```text
/// A = h2*h7 - h1*h8
/// B = h5*h7 - h4*h8
/// C = -[(h2^2 + h5^2 - h1^2 - h4^2) h7 h8 + (h1 h2 + h4 h5)(h7^2 - h8^2)] / (h7^2 + h8^2)
/// ```
///
/// The sign of `C` is fixed by the synthetic-camera oracle: a camera
/// rotated about the pattern x-axis with principal point `(cx, 0)` must
/// produce the vertical line `u = cx`.
pub fn pl_from_homography(h: &Homography) -> Result<PrincipalLine> {
    let [h1, h2, _h3, h4, h5, _h6, h7, h8, _h9] = h.entries();
    if h7.hypot(h8) <= FRONTO_TOL {
        return Err(Error::FrontoParallel);
    }
    let a = h2 * h7 - h1 * h8;
    let b = h5 * h7 - h4 * h8;
    if a.hypot(b) <= DIRECTION_TOL {
        return Err(Error::DegeneratePl);
    }
    let c = -(((h2 * h2 + h5 * h5 - h1 * h1 - h4 * h4) * h7 * h8)
        + (h1 * h2 + h4 * h5) * (h7 * h7 - h8 * h8))
        / (h7 * h7 + h8 * h8);
    Ok(PrincipalLine {
        line: ProjectiveLine::new(a, b, c).normalized()?,
        method: PlMethod::Homography,
        source: SourceCondition {
            h7,
            h8,
            det: Some(h.det()),
        },
    })
}

/// Principal line from two pairs of finite orthogonal vanishing points
/// `(m1,n1)..(m4,n4)`:
///
/// ```text
/// (m2-m1) u + (n2-n1) v + c = 0
/// c = -[(m2-m1)(m1 m2 - m3 m4)/(m1+m2-m3-m4) + (n2-n1)(n1 n2 - n3 n4)/(n1+n2-n3-n4)]
/// ```
///
/// Any point at infinity yields [`Error::InfiniteVanishingPoint`] so the
/// caller can dispatch to the limit form instead.
pub fn pl_from_ovps(quad: &OvpQuad) -> Result<PrincipalLine> {
    let mut m = [0.0; 4];
    let mut n = [0.0; 4];
    for (i, p) in quad.points().iter().enumerate() {
        match p.classify(CLASSIFY_EPS) {
            PointClass::Finite { u, v } => {
                m[i] = u;
                n[i] = v;
            }
            PointClass::Infinite { .. } => return Err(Error::InfiniteVanishingPoint),
        }
    }

    let a = m[1] - m[0];
    let b = n[1] - n[0];
    let coord_scale = m
        .iter()
        .chain(n.iter())
        .fold(1.0_f64, |acc, v| acc.max(v.abs()));
    if a.hypot(b) <= DIRECTION_TOL * coord_scale {
        return Err(Error::DegeneratePl);
    }

    let dm = m[0] + m[1] - m[2] - m[3];
    let m_scale = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if dm.abs() <= DENOM_REL_TOL * m_scale {
        return Err(Error::DegenerateDenominator);
    }
    let dn = n[0] + n[1] - n[2] - n[3];
    let n_scale = n.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if dn.abs() <= DENOM_REL_TOL * n_scale {
        return Err(Error::DegenerateDenominator);
    }

    let c = -(a * (m[0] * m[1] - m[2] * m[3]) / dm + b * (n[0] * n[1] - n[2] * n[3]) / dn);
    Ok(PrincipalLine {
        line: ProjectiveLine::new(a, b, c).normalized()?,
        method: PlMethod::Ovp,
        source: SourceCondition {
            h7: quad.pv1().w,
            h8: quad.pv2().w,
            det: None,
        },
    })
}

/// Limit of the vanishing-point form when the first point escapes to
/// infinity along `dir1 = (m1, n1)`: the second pair drops out entirely,
/// leaving the line through `pv2` with normal parallel to `dir1`:
///
/// ```text
/// -m1 u - n1 v + (m1 m2 + n1 n2) = 0
/// ```
///
/// Incidence with `pv2` is exact by construction. The overall line scale
/// is free, so the orientation sign of `dir1` does not matter.
pub fn pl_from_ovps_infinite_pv1(dir1: (f64, f64), pv2: &HomogeneousPoint2) -> Result<PrincipalLine> {
    let n = dir1.0.hypot(dir1.1);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::InvalidInput("zero or non-finite direction".into()));
    }
    let (m1, n1) = (dir1.0 / n, dir1.1 / n);
    let (m2, n2) = match pv2.classify(CLASSIFY_EPS) {
        PointClass::Finite { u, v } => (u, v),
        PointClass::Infinite { .. } => return Err(Error::InfiniteVanishingPoint),
    };
    let line = ProjectiveLine::new(-m1, -n1, m1 * m2 + n1 * n2).normalized()?;
    Ok(PrincipalLine {
        line,
        method: PlMethod::OvpInfinite,
        source: SourceCondition {
            h7: 0.0,
            h8: pv2.w,
            det: None,
        },
    })
}

/// Limit of the vanishing-point form when one member of the *second*
/// pair escapes to infinity: the c-fraction collapses onto the remaining
/// finite member `(mf, nf)` of that pair, leaving
///
/// ```text
/// (m2-m1) u + (n2-n1) v - [(m2-m1) mf + (n2-n1) nf] = 0
/// ```
///
/// that is, the line through that point with the usual normal. Agrees
/// with [`pl_from_homography`] whenever the quad comes from a
/// homography. [`pl_auto`] prefers the homography form for these inputs;
/// this form exists for callers that must stay on the vanishing-point
/// route.
pub fn pl_from_ovps_infinite_second_pair(
    pv1: &HomogeneousPoint2,
    pv2: &HomogeneousPoint2,
    finite_second: &HomogeneousPoint2,
) -> Result<PrincipalLine> {
    let finite = |p: &HomogeneousPoint2| match p.classify(CLASSIFY_EPS) {
        PointClass::Finite { u, v } => Ok((u, v)),
        PointClass::Infinite { .. } => Err(Error::InfiniteVanishingPoint),
    };
    let (m1, n1) = finite(pv1)?;
    let (m2, n2) = finite(pv2)?;
    let (mf, nf) = finite(finite_second)?;
    let a = m2 - m1;
    let b = n2 - n1;
    let coord_scale = [m1, n1, m2, n2, mf, nf]
        .iter()
        .fold(1.0_f64, |acc, v| acc.max(v.abs()));
    if a.hypot(b) <= DIRECTION_TOL * coord_scale {
        return Err(Error::DegeneratePl);
    }
    let c = -(a * mf + b * nf);
    Ok(PrincipalLine {
        line: ProjectiveLine::new(a, b, c).normalized()?,
        method: PlMethod::OvpInfinite,
        source: SourceCondition {
            h7: pv1.w,
            h8: pv2.w,
            det: None,
        },
    })
}

/// Computes the principal line via the vanishing-point routes when they
/// are well posed and falls back to the homography form otherwise.
///
/// Dispatch: with `pv1` or `pv2` at infinity the limit form is used with
/// the other, finite, point. With all four points finite the
/// vanishing-point form is tried; if it reports an infinite point in the
/// second pair, an ill-conditioned denominator, or a degenerate
/// direction, the homography form takes over. Every branch returns the
/// same line up to scale.
pub fn pl_auto(h: &Homography, dir: DirectionPair) -> Result<PrincipalLine> {
    let [.., h7, h8, _h9] = h.entries();
    if h7.hypot(h8) <= FRONTO_TOL {
        return Err(Error::FrontoParallel);
    }
    let quad = OvpQuad::from_columns(h, dir);
    let c1 = quad.pv1().classify(CLASSIFY_EPS);
    let c2 = quad.pv2().classify(CLASSIFY_EPS);
    match (c1, c2) {
        (PointClass::Infinite { dx, dy }, PointClass::Finite { .. }) => {
            pl_from_ovps_infinite_pv1((dx, dy), quad.pv2())
        }
        (PointClass::Finite { .. }, PointClass::Infinite { dx, dy }) => {
            pl_from_ovps_infinite_pv1((dx, dy), quad.pv1())
        }
        (PointClass::Finite { .. }, PointClass::Finite { .. }) => match pl_from_ovps(&quad) {
            Ok(pl) => Ok(pl),
            Err(
                Error::InfiniteVanishingPoint
                | Error::DegenerateDenominator
                | Error::DegeneratePl,
            ) => pl_from_homography(h),
            Err(e) => Err(e),
        },
        // Both axis directions at infinity means h7 = h8 = 0, which the
        // fronto-parallel guard above already rejected.
        (PointClass::Infinite { .. }, PointClass::Infinite { .. }) => Err(Error::FrontoParallel),
    }
}
