//! Homogeneous 2-D points, projective lines, and the 3x3 plane-to-image
//! homography, with the primitive constructions everything else is built
//! from: join, meet, point mapping, normalization, and scale-free
//! comparison.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for proportionality tests between unit-scaled 3-vectors.
pub const PROPORTIONALITY_TOL: f64 = 1e-12;

/// Minimum |det| of a homography after canonical scaling.
pub const DET_TOL: f64 = 1e-10;

/// Default relative threshold separating finite points from directions at
/// infinity when classifying a homogeneous point.
pub const CLASSIFY_EPS: f64 = 1e-9;

/// A point of the projective plane in homogeneous coordinates `(x, y, w)`.
///
/// Finite points have `w != 0` and dehomogenize to `(x/w, y/w)`; `w = 0`
/// encodes the direction `(x, y)` at infinity. Scalar multiples describe
/// the same point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousPoint2 {
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

/// Outcome of classifying a homogeneous point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointClass {
    /// Dehomogenized image coordinates.
    Finite { u: f64, v: f64 },
    /// Unit direction of a point at infinity.
    Infinite { dx: f64, dy: f64 },
}

impl HomogeneousPoint2 {
    pub fn new(x: f64, y: f64, w: f64) -> Self {
        Self { x, y, w }
    }

    /// Finite point at image coordinates `(u, v)`.
    pub fn finite(u: f64, v: f64) -> Self {
        Self { x: u, y: v, w: 1.0 }
    }

    /// Point at infinity in direction `(dx, dy)`.
    pub fn at_infinity(dx: f64, dy: f64) -> Self {
        Self { x: dx, y: dy, w: 0.0 }
    }

    /// Euclidean norm of the coordinate triple.
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.w * self.w).sqrt()
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.w.is_finite()
            && (self.x != 0.0 || self.y != 0.0 || self.w != 0.0)
    }

    /// Splits into a finite point or a direction at infinity.
    ///
    /// The point is finite when `|w| > eps * max(|x|, |y|, |w|)`, so the
    /// decision is invariant under rescaling of the triple.
    pub fn classify(&self, eps: f64) -> PointClass {
        let scale = self.x.abs().max(self.y.abs()).max(self.w.abs());
        if self.w.abs() > eps * scale {
            PointClass::Finite {
                u: self.x / self.w,
                v: self.y / self.w,
            }
        } else {
            let n = self.x.hypot(self.y);
            PointClass::Infinite {
                dx: self.x / n,
                dy: self.y / n,
            }
        }
    }

    /// True when the two triples are parallel: the sine of the angle
    /// between them is at most `tol`.
    pub fn proportional_to(&self, other: &Self, tol: f64) -> bool {
        let cx = self.y * other.w - self.w * other.y;
        let cy = self.w * other.x - self.x * other.w;
        let cw = self.x * other.y - self.y * other.x;
        let cross = (cx * cx + cy * cy + cw * cw).sqrt();
        cross <= tol * self.norm() * other.norm()
    }

    /// Largest absolute difference between the unit-scaled triples, after
    /// aligning their signs. Zero for exact scalar multiples.
    pub fn direction_distance(&self, other: &Self) -> f64 {
        let (n1, n2) = (self.norm(), other.norm());
        let a = [self.x / n1, self.y / n1, self.w / n1];
        let b = [other.x / n2, other.y / n2, other.w / n2];
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let s = if dot < 0.0 { -1.0 } else { 1.0 };
        (a[0] - s * b[0])
            .abs()
            .max((a[1] - s * b[1]).abs())
            .max((a[2] - s * b[2]).abs())
    }
}

/// A projective line with coefficients `(a, b, c)`: the locus of points
/// `(x, y, w)` with `ax + by + cw = 0`. Defined up to scale. The line at
/// infinity has `a = b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveLine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ProjectiveLine {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// Join of two points: the cross product of their coordinate triples.
    ///
    /// Fails with [`Error::CoincidentPoints`] when `p` and `q` are scalar
    /// multiples of each other within [`PROPORTIONALITY_TOL`].
    pub fn through_points(p: &HomogeneousPoint2, q: &HomogeneousPoint2) -> Result<Self> {
        if p.proportional_to(q, PROPORTIONALITY_TOL) {
            return Err(Error::CoincidentPoints);
        }
        Ok(Self {
            a: p.y * q.w - p.w * q.y,
            b: p.w * q.x - p.x * q.w,
            c: p.x * q.y - p.y * q.x,
        })
    }

    /// Meet of two lines: the cross product of their coefficient triples.
    ///
    /// Parallel distinct lines meet at a `w = 0` point, which is returned,
    /// not treated as an error. Fails with [`Error::CoincidentLines`] when
    /// the lines are scalar multiples of each other.
    pub fn intersect(&self, other: &Self) -> Result<HomogeneousPoint2> {
        let x = self.b * other.c - self.c * other.b;
        let y = self.c * other.a - self.a * other.c;
        let w = self.a * other.b - self.b * other.a;
        let cross = (x * x + y * y + w * w).sqrt();
        if cross <= PROPORTIONALITY_TOL * self.norm() * other.norm() {
            return Err(Error::CoincidentLines);
        }
        Ok(HomogeneousPoint2::new(x, y, w))
    }

    /// Signed incidence residual `a*x + b*y + c*w`.
    pub fn eval(&self, p: &HomogeneousPoint2) -> f64 {
        self.a * p.x + self.b * p.y + self.c * p.w
    }

    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c).sqrt()
    }

    pub fn is_valid(&self) -> bool {
        self.a.is_finite()
            && self.b.is_finite()
            && self.c.is_finite()
            && (self.a != 0.0 || self.b != 0.0 || self.c != 0.0)
    }

    /// Scales so that `a^2 + b^2 = 1` and fixes the sign so that `b > 0`,
    /// or `a > 0` when `b = 0`. The line at infinity is rejected.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.a.hypot(self.b);
        if n == 0.0 {
            return Err(Error::LineAtInfinity);
        }
        let (mut a, mut b, mut c) = (self.a / n, self.b / n, self.c / n);
        let flip = b < 0.0 || (b == 0.0 && a < 0.0);
        if flip {
            a = -a;
            b = -b;
            c = -c;
        }
        // +0.0 scrubs negative zeros introduced by the sign flip.
        Ok(Self {
            a: a + 0.0,
            b: b + 0.0,
            c: c + 0.0,
        })
    }

    /// True when both lines normalize to the same representative within
    /// `tol` in the infinity norm. Propagates [`Error::LineAtInfinity`].
    pub fn eq_up_to_scale(&self, other: &Self, tol: f64) -> Result<bool> {
        let l1 = self.normalized()?;
        let l2 = other.normalized()?;
        let d = (l1.a - l2.a)
            .abs()
            .max((l1.b - l2.b).abs())
            .max((l1.c - l2.c).abs());
        Ok(d <= tol)
    }
}

/// JSON shape of a homography: row-major entries `h1..h9`.
#[derive(Serialize, Deserialize)]
struct HomographyWire {
    h: [f64; 9],
}

/// An invertible 3x3 plane-to-image projective map, stored in canonical
/// form: unit Frobenius norm with the largest-magnitude entry positive
/// (ties broken by the first such entry in row-major order). Any nonzero
/// scalar multiple of the same map canonicalizes to the identical
/// representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HomographyWire", into = "HomographyWire")]
pub struct Homography {
    h: [f64; 9],
}

impl Homography {
    /// Canonicalizes row-major entries and validates invertibility:
    /// |det| of the canonical representative must exceed [`DET_TOL`].
    pub fn new(entries: [f64; 9]) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite homography entry".into()));
        }
        let norm = entries.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateHomography);
        }
        let mut h = entries.map(|v| v / norm);
        let mut lead = 0;
        for (i, v) in h.iter().enumerate() {
            if v.abs() > h[lead].abs() {
                lead = i;
            }
        }
        if h[lead] < 0.0 {
            h = h.map(|v| -v + 0.0);
        }
        let m = Self { h };
        if m.det().abs() <= DET_TOL {
            return Err(Error::DegenerateHomography);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self::new([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).expect("identity is invertible")
    }

    pub fn from_matrix(m: &Matrix3<f64>) -> Result<Self> {
        Self::new([
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ])
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_row_slice(&self.h)
    }

    /// Canonical row-major entries `h1..h9`.
    pub fn entries(&self) -> [f64; 9] {
        self.h
    }

    /// Determinant of the canonical representative.
    pub fn det(&self) -> f64 {
        let h = &self.h;
        h[0] * (h[4] * h[8] - h[5] * h[7]) - h[1] * (h[3] * h[8] - h[5] * h[6])
            + h[2] * (h[3] * h[7] - h[4] * h[6])
    }

    /// Applies the map to a point, returning the raw homogeneous triple.
    /// A `w = 0` output is legal and encodes a point at infinity.
    pub fn map(&self, p: &HomogeneousPoint2) -> HomogeneousPoint2 {
        let h = &self.h;
        HomogeneousPoint2::new(
            h[0] * p.x + h[1] * p.y + h[2] * p.w,
            h[3] * p.x + h[4] * p.y + h[5] * p.w,
            h[6] * p.x + h[7] * p.y + h[8] * p.w,
        )
    }
}

impl TryFrom<HomographyWire> for Homography {
    type Error = Error;

    fn try_from(w: HomographyWire) -> Result<Self> {
        Self::new(w.h)
    }
}

impl From<Homography> for HomographyWire {
    fn from(h: Homography) -> Self {
        Self { h: h.h }
    }
}
